//! Deterministic automata over k-track binary alphabets.
//!
//! A single [`Automaton`] type covers DFAs and DFAOs: every state carries
//! an output, and a DFA is the special case whose outputs are 0/1
//! (1 = accepting). Symbols of a k-track automaton are the integers
//! `0..2^k`; track `i` is bit `k-1-i`, so numeric symbol order is the
//! lexicographic order on tuples `[b1,…,bk]` and symbol 0 is the all-zero
//! padding symbol.
//!
//! Words are read most-significant digit first. Automata built by this
//! crate are *zero-normalized*: prepending all-zero symbols never changes
//! acceptance.

mod io;
mod minimize;
mod ops;
mod regex;
mod rel;

use std::collections::VecDeque;
use std::fmt;
use std::hash::Hash;

use rustc_hash::FxHashMap;

pub use io::{deserialize, export_dot, serialize};
pub use ops::{combine, Nfa};
pub use regex::regex_compile;
pub use rel::{valid_dfa, Rel};

use crate::error::{Error, Result};
use crate::numeration::encode_u64;

/// Upper bound on track count; the transition table is dense in `2^arity`.
pub const MAX_ARITY: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Dfa,
    Dfao,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Dfa => "DFA",
            Kind::Dfao => "DFAO",
        }
    }
}

/// Bit of `track` in `symbol` for an automaton of the given arity.
#[inline]
pub fn symbol_bit(symbol: u32, arity: usize, track: usize) -> u32 {
    (symbol >> (arity - 1 - track)) & 1
}

/// Symbol index of a tuple of bits.
pub fn symbol_from_bits(bits: &[u8]) -> u32 {
    bits.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32)
}

pub fn symbol_to_bits(symbol: u32, arity: usize) -> Vec<u8> {
    (0..arity).map(|t| symbol_bit(symbol, arity, t) as u8).collect()
}

/// `[b1,…,bk]`.
pub fn format_symbol(symbol: u32, arity: usize) -> String {
    let bits: Vec<String> = symbol_to_bits(symbol, arity)
        .into_iter()
        .map(|b| b.to_string())
        .collect();
    format!("[{}]", bits.join(","))
}

/// Zero-padded parallel encoding of a tuple of naturals, as a symbol word.
pub fn encode_tuple(values: &[u64]) -> Vec<u32> {
    let reps: Vec<_> = values.iter().map(|&v| encode_u64(v)).collect();
    let len = reps.iter().map(|r| r.len()).max().unwrap_or(0);
    let padded: Vec<Vec<u8>> = reps.iter().map(|r| r.padded(len)).collect();
    (0..len)
        .map(|i| padded.iter().fold(0u32, |acc, p| (acc << 1) | p[i] as u32))
        .collect()
}

/// Word over a 1-track alphabet from a digit string.
pub fn word_from_digits(digits: &[u8]) -> Vec<u32> {
    digits.iter().map(|&d| d as u32).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    arity: usize,
    kind: Kind,
    initial: u32,
    outputs: Vec<u32>,
    trans: Vec<u32>,
    zero_normalized: bool,
}

impl Automaton {
    /// Build from raw parts; `trans[q * 2^arity + s]` is the successor of `q` on `s`.
    pub fn from_parts(
        arity: usize,
        kind: Kind,
        initial: u32,
        outputs: Vec<u32>,
        trans: Vec<u32>,
    ) -> Result<Self> {
        if arity > MAX_ARITY {
            return Err(Error::InvalidArgument(format!("arity {arity} exceeds {MAX_ARITY}")));
        }
        let n = outputs.len();
        let nsym = 1usize << arity;
        if n == 0 {
            return Err(Error::InvalidArgument("automaton needs at least one state".into()));
        }
        if trans.len() != n * nsym {
            return Err(Error::InvalidArgument(format!(
                "transition table has {} entries, expected {}",
                trans.len(),
                n * nsym
            )));
        }
        if initial as usize >= n || trans.iter().any(|&t| t as usize >= n) {
            return Err(Error::InvalidArgument("state id out of range".into()));
        }
        if kind == Kind::Dfa && outputs.iter().any(|&o| o > 1) {
            return Err(Error::InvalidArgument("DFA outputs must be 0 or 1".into()));
        }
        let mut a = Self { arity, kind, initial, outputs, trans, zero_normalized: false };
        a.zero_normalized = a.check_zero_invariant();
        Ok(a)
    }

    pub(crate) fn from_parts_unchecked(
        arity: usize,
        kind: Kind,
        initial: u32,
        outputs: Vec<u32>,
        trans: Vec<u32>,
        zero_normalized: bool,
    ) -> Self {
        debug_assert_eq!(trans.len(), outputs.len() << arity);
        Self { arity, kind, initial, outputs, trans, zero_normalized }
    }

    /// Breadth-first construction from an implicit state space.
    ///
    /// `step` returns `None` for a rejecting sink; that sink is materialized
    /// once, with output 0.
    pub fn explore<S, F, O>(arity: usize, kind: Kind, start: S, mut step: F, output: O) -> Self
    where
        S: Clone + Eq + Hash,
        F: FnMut(&S, u32) -> Option<S>,
        O: Fn(&S) -> u32,
    {
        let nsym = 1u32 << arity;
        let mut ids: FxHashMap<S, u32> = FxHashMap::default();
        let mut states = vec![start.clone()];
        ids.insert(start, 0);
        let mut trans: Vec<u32> = Vec::new();
        let mut dead: Option<u32> = None;
        // sink placeholder is patched after exploration
        const SINK: u32 = u32::MAX;
        let mut i = 0;
        while i < states.len() {
            for s in 0..nsym {
                let t = match step(&states[i], s) {
                    None => SINK,
                    Some(next) => match ids.get(&next) {
                        Some(&id) => id,
                        None => {
                            let id = states.len() as u32;
                            ids.insert(next.clone(), id);
                            states.push(next);
                            id
                        }
                    },
                };
                trans.push(t);
            }
            i += 1;
        }
        let mut outputs: Vec<u32> = states.iter().map(&output).collect();
        if trans.contains(&SINK) {
            let id = outputs.len() as u32;
            dead = Some(id);
            outputs.push(0);
            trans.extend(std::iter::repeat_n(id, nsym as usize));
        }
        if let Some(d) = dead {
            for t in trans.iter_mut() {
                if *t == SINK {
                    *t = d;
                }
            }
        }
        let mut a = Self { arity, kind, initial: 0, outputs, trans, zero_normalized: false };
        a.zero_normalized = a.check_zero_invariant();
        a
    }

    /// One-state automaton with a constant output.
    pub fn constant(arity: usize, kind: Kind, output: u32) -> Self {
        Self {
            arity,
            kind,
            initial: 0,
            outputs: vec![output],
            trans: vec![0; 1 << arity],
            zero_normalized: true,
        }
    }

    pub fn universal(arity: usize) -> Self {
        Self::constant(arity, Kind::Dfa, 1)
    }

    pub fn empty(arity: usize) -> Self {
        Self::constant(arity, Kind::Dfa, 0)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn num_symbols(&self) -> u32 {
        1 << self.arity
    }

    pub fn num_states(&self) -> usize {
        self.outputs.len()
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    #[inline]
    pub fn next(&self, q: u32, symbol: u32) -> u32 {
        self.trans[((q as usize) << self.arity) + symbol as usize]
    }

    pub fn output(&self, q: u32) -> u32 {
        self.outputs[q as usize]
    }

    pub fn outputs(&self) -> &[u32] {
        &self.outputs
    }

    pub(crate) fn transitions(&self) -> &[u32] {
        &self.trans
    }

    pub fn is_accepting(&self, q: u32) -> bool {
        self.outputs[q as usize] != 0
    }

    pub fn is_zero_normalized(&self) -> bool {
        self.zero_normalized
    }

    pub(crate) fn set_zero_normalized(&mut self, flag: bool) {
        self.zero_normalized = flag;
    }

    /// Reinterpret as a DFAO (outputs kept).
    pub fn into_dfao(mut self) -> Self {
        self.kind = Kind::Dfao;
        self
    }

    /// DFA accepting the states whose output satisfies `pred`.
    pub fn output_filter(&self, pred: impl Fn(u32) -> bool) -> Self {
        let outputs = self.outputs.iter().map(|&o| pred(o) as u32).collect();
        let mut a = Self { outputs, kind: Kind::Dfa, ..self.clone() };
        a.zero_normalized = a.check_zero_invariant();
        a
    }

    pub fn run(&self, word: &[u32]) -> u32 {
        word.iter().fold(self.initial, |q, &s| self.next(q, s))
    }

    pub fn accepts(&self, word: &[u32]) -> bool {
        self.is_accepting(self.run(word))
    }

    /// Membership of a tuple of naturals, zero-padded to equal length.
    pub fn accepts_values(&self, values: &[u64]) -> bool {
        assert_eq!(values.len(), self.arity, "tuple length must equal arity");
        self.accepts(&encode_tuple(values))
    }

    /// Output after reading `encode(n)` on a 1-track automaton.
    pub fn value(&self, n: u64) -> u32 {
        assert_eq!(self.arity, 1, "value() needs a 1-track automaton");
        self.output(self.run(&encode_tuple(&[n])))
    }

    fn check_zero_invariant(&self) -> bool {
        // equivalent initial and 0-successor states imply invariance
        let q0 = self.initial;
        let q1 = self.next(q0, 0);
        q0 == q1 || minimize::states_equivalent(self, q0, q1)
    }

    /// States reachable from the initial state, in BFS order.
    pub fn reachable(&self) -> Vec<u32> {
        let n = self.num_states();
        let mut seen = vec![false; n];
        let mut order = vec![self.initial];
        seen[self.initial as usize] = true;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            for s in 0..self.num_symbols() {
                let t = self.next(q, s);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    order.push(t);
                }
            }
            i += 1;
        }
        order
    }

    /// Non-initial sinks with output 0.
    pub fn dead_states(&self) -> Vec<u32> {
        (0..self.num_states() as u32)
            .filter(|&q| {
                q != self.initial
                    && self.outputs[q as usize] == 0
                    && (0..self.num_symbols()).all(|s| self.next(q, s) == q)
            })
            .collect()
    }

    /// Reachable states minus the dead sink. Reported state counts use this.
    pub fn live_state_count(&self) -> usize {
        let reach = self.reachable();
        let dead = self.dead_states();
        reach.iter().filter(|q| !dead.contains(q)).count()
    }

    pub fn is_empty(&self) -> bool {
        self.reachable().iter().all(|&q| !self.is_accepting(q))
    }

    /// Up to `limit` accepted words, shortest first, ties in symbol order.
    pub fn sample_language(&self, limit: usize) -> Vec<Vec<u32>> {
        let co = self.coreachable();
        let mut out = Vec::new();
        let mut queue: VecDeque<(u32, Vec<u32>)> = VecDeque::new();
        if co[self.initial as usize] {
            queue.push_back((self.initial, Vec::new()));
        }
        while let Some((q, w)) = queue.pop_front() {
            if out.len() >= limit {
                break;
            }
            if self.is_accepting(q) {
                out.push(w.clone());
            }
            for s in 0..self.num_symbols() {
                let t = self.next(q, s);
                if co[t as usize] {
                    let mut w2 = w.clone();
                    w2.push(s);
                    queue.push_back((t, w2));
                }
            }
            // bounded frontier keeps this usable on large automata
            if queue.len() > 1 << 22 {
                break;
            }
        }
        out
    }

    /// States from which some accepting state is reachable.
    pub fn coreachable(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for q in 0..n as u32 {
            for s in 0..self.num_symbols() {
                rev[self.next(q, s) as usize].push(q);
            }
        }
        let mut co: Vec<bool> = self.outputs.iter().map(|&o| o != 0).collect();
        let mut stack: Vec<u32> = (0..n as u32).filter(|&q| co[q as usize]).collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q as usize] {
                if !co[p as usize] {
                    co[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        co
    }

    /// Unique minimal automaton, states numbered by BFS in symbol order.
    pub fn minimize(&self) -> Self {
        minimize::minimize(self)
    }

    /// Language (or output-function) equality.
    pub fn equivalent(&self, other: &Self) -> Result<bool> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: other.arity });
        }
        let a = self.minimize();
        let b = other.minimize();
        Ok(a.initial == b.initial && a.outputs == b.outputs && a.trans == b.trans)
    }

    /// Shortest word on which the two automata produce different outputs.
    pub fn distinguishing_word(&self, other: &Self) -> Result<Option<Vec<u32>>> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: other.arity });
        }
        let mut seen: FxHashMap<(u32, u32), ()> = FxHashMap::default();
        let mut queue = VecDeque::new();
        queue.push_back((self.initial, other.initial, Vec::new()));
        seen.insert((self.initial, other.initial), ());
        while let Some((p, q, w)) = queue.pop_front() {
            if self.output(p) != other.output(q) {
                return Ok(Some(w));
            }
            for s in 0..self.num_symbols() {
                let key = (self.next(p, s), other.next(q, s));
                if seen.insert(key, ()).is_none() {
                    let mut w2 = w.clone();
                    w2.push(s);
                    queue.push_back((key.0, key.1, w2));
                }
            }
        }
        Ok(None)
    }
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

/// Render a symbol word; single-track words print as digit strings.
pub fn format_word(word: &[u32], arity: usize) -> String {
    if word.is_empty() {
        return "ε".into();
    }
    if arity == 1 {
        return word.iter().map(|s| s.to_string()).collect();
    }
    word.iter().map(|&s| format_symbol(s, arity)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Accepts valid Fibonacci strings decoding to an even number.
    fn parity_dfa(want_even: bool) -> Automaton {
        // state: (value mod 2, next-shift value mod 2, last digit)
        Automaton::explore(
            1,
            Kind::Dfa,
            (0u8, 0u8, 0u8),
            |&(a, b, last), s| {
                if s == 1 && last == 1 {
                    None
                } else if s == 0 {
                    Some((b, (a + b) % 2, 0))
                } else {
                    Some(((b + 1) % 2, (a + b) % 2, 1))
                }
            },
            move |&(a, _, _)| ((a == 0) == want_even) as u32,
        )
    }

    #[test]
    fn symbol_order_is_lexicographic() {
        assert_eq!(symbol_from_bits(&[0, 1]), 1);
        assert_eq!(symbol_from_bits(&[1, 0]), 2);
        assert_eq!(format_symbol(2, 2), "[1,0]");
        assert_eq!(encode_tuple(&[1, 2]), vec![1, 2]);
    }

    #[test]
    fn parity_dfa_matches_arithmetic() {
        let even = parity_dfa(true);
        assert!(even.is_zero_normalized());
        for n in 0..2000u64 {
            assert_eq!(even.accepts_values(&[n]), n % 2 == 0, "n = {n}");
        }
    }

    #[test]
    fn empty_and_epsilon() {
        assert!(Automaton::empty(2).is_empty());
        assert!(!Automaton::universal(0).is_empty());
        let even = parity_dfa(true);
        assert_eq!(even.accepts(&[]), even.is_accepting(even.initial()));
    }

    #[test]
    fn union_of_even_and_odd_is_all_valid() {
        let u = parity_dfa(true).union(&parity_dfa(false)).unwrap();
        for n in 0..10_000u64 {
            assert!(u.accepts_values(&[n]));
        }
        assert!(!u.accepts(&[1, 1]));
    }

    #[test]
    fn dead_state_excluded_from_live_count() {
        let even = parity_dfa(true).minimize();
        assert_eq!(even.dead_states().len(), 1);
        assert_eq!(even.live_state_count(), even.num_states() - 1);
    }

    #[test]
    fn sample_language_is_shortest_first() {
        let even = parity_dfa(true);
        let words = even.sample_language(5);
        assert_eq!(words[0], Vec::<u32>::new());
        assert!(words.windows(2).all(|w| w[0].len() <= w[1].len()));
    }
}
