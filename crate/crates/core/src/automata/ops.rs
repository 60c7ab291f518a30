//! Boolean operations, track manipulation, projection and determinization.

use rustc_hash::FxHashMap;

use super::{format_word, symbol_bit, Automaton, Kind};
use crate::error::{Error, Result};

/// Synchronous product over possibly different track layouts.
///
/// `amap[s]` / `bmap[s]` give the operand symbols read on result symbol `s`.
pub(crate) fn product_mapped(
    a: &Automaton,
    amap: &[u32],
    b: &Automaton,
    bmap: &[u32],
    arity: usize,
    kind: Kind,
    out: impl Fn(u32, u32) -> u32,
) -> Automaton {
    let nsym = 1usize << arity;
    debug_assert!(amap.len() == nsym && bmap.len() == nsym);
    let mut ids: FxHashMap<(u32, u32), u32> = FxHashMap::default();
    let mut pairs = vec![(a.initial(), b.initial())];
    ids.insert(pairs[0], 0);
    let mut trans: Vec<u32> = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        for s in 0..nsym {
            let key = (a.next(p, amap[s]), b.next(q, bmap[s]));
            let next_id = pairs.len() as u32;
            let id = *ids.entry(key).or_insert_with(|| {
                pairs.push(key);
                next_id
            });
            trans.push(id);
        }
        i += 1;
    }
    let outputs = pairs.iter().map(|&(p, q)| out(a.output(p), b.output(q))).collect();
    let zn = a.is_zero_normalized()
        && b.is_zero_normalized()
        && amap[0] == 0
        && bmap[0] == 0;
    Automaton::from_parts_unchecked(arity, kind, 0, outputs, trans, zn)
}

fn identity_map(arity: usize) -> Vec<u32> {
    (0..1u32 << arity).collect()
}

impl Automaton {
    /// Product of two automata on the same tracks with a custom output.
    pub fn product(&self, other: &Self, kind: Kind, out: impl Fn(u32, u32) -> u32) -> Result<Self> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), found: other.arity() });
        }
        let id = identity_map(self.arity());
        Ok(product_mapped(self, &id, other, &id, self.arity(), kind, out).minimize())
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.product(other, Kind::Dfa, |x, y| (x != 0 && y != 0) as u32)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.product(other, Kind::Dfa, |x, y| (x != 0 || y != 0) as u32)
    }

    /// Complement of a DFA (the table is always complete).
    pub fn complement(&self) -> Result<Self> {
        if self.kind() != Kind::Dfa {
            return Err(Error::WrongKind { expected: "DFA", found: self.kind().name() });
        }
        let outputs = self.outputs().iter().map(|&o| (o == 0) as u32).collect();
        Ok(Automaton::from_parts_unchecked(
            self.arity(),
            Kind::Dfa,
            self.initial(),
            outputs,
            self.transitions().to_vec(),
            self.is_zero_normalized(),
        ))
    }

    /// Re-layout tracks: old track `i` is read from new track `map[i]`.
    ///
    /// With an injective map the new tracks not hit are free (cylindrification);
    /// a non-injective map identifies tracks (diagonal).
    pub fn reindex(&self, new_arity: usize, map: &[usize]) -> Result<Self> {
        if map.len() != self.arity() {
            return Err(Error::InvalidTrackMap(format!(
                "map has {} entries for arity {}",
                map.len(),
                self.arity()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&t| t >= new_arity) {
            return Err(Error::TrackOutOfRange { track: bad, arity: new_arity });
        }
        if new_arity > super::MAX_ARITY {
            return Err(Error::InvalidArgument(format!("arity {new_arity} too large")));
        }
        let old_arity = self.arity();
        let symbol_map: Vec<u32> = (0..1u32 << new_arity)
            .map(|s| {
                (0..old_arity).fold(0u32, |acc, i| (acc << 1) | symbol_bit(s, new_arity, map[i]))
            })
            .collect();
        let n = self.num_states();
        let nsym = 1usize << new_arity;
        let mut trans = Vec::with_capacity(n * nsym);
        for q in 0..n as u32 {
            for &os in &symbol_map {
                trans.push(self.next(q, os));
            }
        }
        Ok(Automaton::from_parts_unchecked(
            new_arity,
            self.kind(),
            self.initial(),
            self.outputs().to_vec(),
            trans,
            self.is_zero_normalized(),
        ))
    }

    /// Injective re-layout into `new_arity` tracks; unmapped tracks are free.
    pub fn cylindrify(&self, new_arity: usize, positions: &[usize]) -> Result<Self> {
        let mut seen = vec![false; new_arity];
        for &p in positions {
            if p >= new_arity {
                return Err(Error::TrackOutOfRange { track: p, arity: new_arity });
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidTrackMap(format!("track {p} targeted twice")));
            }
        }
        self.reindex(new_arity, positions)
    }

    /// Accepts `w` iff this DFA accepts `0^k w` for some `k`, where `w` is
    /// taken with its leading zero symbols removed.
    pub fn zero_normalize(&self) -> Result<Self> {
        if self.kind() != Kind::Dfa {
            return Err(Error::WrongKind { expected: "DFA", found: self.kind().name() });
        }
        let start = zero_closure(self.initial(), |q| self.next(q, 0));
        let out = subset_construction(
            self.arity(),
            start,
            true,
            |q, s, buf| buf.push(self.next(q, s)),
            |q| self.is_accepting(q),
        );
        let mut m = out.minimize();
        m.set_zero_normalized(true);
        Ok(m)
    }

    /// Existentially quantify one track away.
    ///
    /// The dropped value may be longer than the remaining ones, so the start
    /// set is closed under symbols that are zero on every kept track. The
    /// input is assumed zero-normalized; the result is again zero-normalized
    /// and minimal.
    pub fn project(&self, track: usize) -> Result<Self> {
        if self.kind() != Kind::Dfa {
            return Err(Error::WrongKind { expected: "DFA", found: self.kind().name() });
        }
        let k = self.arity();
        if track >= k {
            return Err(Error::TrackOutOfRange { track, arity: k });
        }
        let low = k - 1 - track; // bit position of the dropped track
        let widen = |s: u32, bit: u32| -> u32 {
            let hi = (s >> low) << (low + 1);
            let lo = s & ((1 << low) - 1);
            hi | (bit << low) | lo
        };
        let mut start = vec![self.initial()];
        let mut seen = vec![false; self.num_states()];
        seen[self.initial() as usize] = true;
        let mut i = 0;
        while i < start.len() {
            let q = start[i];
            for bit in 0..2 {
                let t = self.next(q, widen(0, bit));
                if !std::mem::replace(&mut seen[t as usize], true) {
                    start.push(t);
                }
            }
            i += 1;
        }
        start.sort_unstable();
        let out = subset_construction(
            k - 1,
            start,
            true,
            |q, s, buf| {
                buf.push(self.next(q, widen(s, 0)));
                buf.push(self.next(q, widen(s, 1)));
            },
            |q| self.is_accepting(q),
        );
        let mut m = out.minimize();
        m.set_zero_normalized(true);
        Ok(m)
    }
}

fn zero_closure(q0: u32, step: impl Fn(u32) -> u32) -> Vec<u32> {
    let mut set = vec![q0];
    let mut q = step(q0);
    while !set.contains(&q) {
        set.push(q);
        q = step(q);
    }
    set.sort_unstable();
    set
}

/// Subset construction from `start`. With `zero_loop`, the start state is a
/// dedicated state that stays put on symbol 0.
fn subset_construction(
    arity: usize,
    start: Vec<u32>,
    zero_loop: bool,
    succ: impl Fn(u32, u32, &mut Vec<u32>),
    accepting: impl Fn(u32) -> bool,
) -> Automaton {
    let nsym = 1u32 << arity;
    let mut ids: FxHashMap<Vec<u32>, u32> = FxHashMap::default();
    let mut sets: Vec<Vec<u32>> = vec![start.clone()];
    if !zero_loop {
        ids.insert(start, 0);
    }
    let mut trans: Vec<u32> = Vec::new();
    let mut buf: Vec<u32> = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        for s in 0..nsym {
            if zero_loop && i == 0 && s == 0 {
                trans.push(0);
                continue;
            }
            buf.clear();
            for &q in &sets[i] {
                succ(q, s, &mut buf);
            }
            buf.sort_unstable();
            buf.dedup();
            let id = match ids.get(&buf) {
                Some(&id) => id,
                None => {
                    let id = sets.len() as u32;
                    ids.insert(buf.clone(), id);
                    sets.push(buf.clone());
                    id
                }
            };
            trans.push(id);
        }
        i += 1;
    }
    let outputs = sets
        .iter()
        .map(|set| set.iter().any(|&q| accepting(q)) as u32)
        .collect();
    Automaton::from_parts_unchecked(arity, Kind::Dfa, 0, outputs, trans, zero_loop)
}

/// Nondeterministic automaton; only used transiently.
#[derive(Clone, Debug)]
pub struct Nfa {
    pub arity: usize,
    pub initial: Vec<u32>,
    pub accepting: Vec<bool>,
    /// `trans[q][s]` lists the successors of `q` on `s`.
    pub trans: Vec<Vec<Vec<u32>>>,
}

impl Nfa {
    pub fn new(arity: usize) -> Self {
        Self { arity, initial: Vec::new(), accepting: Vec::new(), trans: Vec::new() }
    }

    pub fn add_state(&mut self, accepting: bool) -> u32 {
        self.accepting.push(accepting);
        self.trans.push(vec![Vec::new(); 1 << self.arity]);
        self.accepting.len() as u32 - 1
    }

    pub fn add_transition(&mut self, from: u32, symbol: u32, to: u32) {
        self.trans[from as usize][symbol as usize].push(to);
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn from_dfa(d: &Automaton) -> Self {
        let mut n = Nfa::new(d.arity());
        for q in 0..d.num_states() as u32 {
            n.add_state(d.is_accepting(q));
        }
        for q in 0..d.num_states() as u32 {
            for s in 0..d.num_symbols() {
                n.add_transition(q, s, d.next(q, s));
            }
        }
        n.initial = vec![d.initial()];
        n
    }

    /// Subset construction followed by minimization.
    pub fn determinize(&self) -> Automaton {
        let mut start = self.initial.clone();
        start.sort_unstable();
        start.dedup();
        subset_construction(
            self.arity,
            start,
            false,
            |q, s, buf| buf.extend_from_slice(&self.trans[q as usize][s as usize]),
            |q| self.accepting[q as usize],
        )
        .minimize()
    }
}

/// DFAO emitting `value` on inputs accepted by the matching part, 0 elsewhere.
pub fn combine(parts: &[(Automaton, u32)]) -> Result<Automaton> {
    let Some((first, _)) = parts.first() else {
        return Err(Error::InvalidArgument("combine needs at least one part".into()));
    };
    let arity = first.arity();
    for (p, _) in parts {
        if p.arity() != arity {
            return Err(Error::ArityMismatch { expected: arity, found: p.arity() });
        }
        if p.kind() != Kind::Dfa {
            return Err(Error::WrongKind { expected: "DFA", found: p.kind().name() });
        }
    }
    // state = tuple of part states; output = index+1 of the accepting part
    let start: Vec<u32> = parts.iter().map(|(p, _)| p.initial()).collect();
    let mut overlap: Option<Vec<u32>> = None;
    let explored = Automaton::explore(
        arity,
        Kind::Dfao,
        start,
        |qs, s| Some(qs.iter().zip(parts).map(|(&q, (p, _))| p.next(q, s)).collect()),
        |qs: &Vec<u32>| {
            let hits: Vec<usize> = qs
                .iter()
                .zip(parts)
                .enumerate()
                .filter(|(_, (&q, (p, _)))| p.is_accepting(q))
                .map(|(i, _)| i)
                .collect();
            match hits.len() {
                0 => 0,
                1 => parts[hits[0]].1,
                _ => u32::MAX,
            }
        },
    );
    if explored.outputs().contains(&u32::MAX) {
        let bad = explored.output_filter(|o| o == u32::MAX);
        overlap = bad.sample_language(1).into_iter().next();
    }
    if let Some(w) = overlap {
        return Err(Error::Overlap { witness: format_word(&w, arity) });
    }
    Ok(explored.minimize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::encode_tuple;

    fn equality() -> Automaton {
        Automaton::explore(2, Kind::Dfa, (), |_, s| (s == 0 || s == 3).then_some(()), |_| 1)
    }

    fn only_010() -> Automaton {
        Automaton::explore(
            1,
            Kind::Dfa,
            0usize,
            |&i, s| {
                let want = [0u32, 1, 0];
                (i < 3 && want[i] == s).then_some(i + 1)
            },
            |&i| (i == 3) as u32,
        )
    }

    #[test]
    fn intersect_with_complement_is_empty() {
        let e = equality();
        assert!(e.intersect(&e.complement().unwrap()).unwrap().is_empty());
        assert!(e.intersect(&e).unwrap().equivalent(&e).unwrap());
    }

    #[test]
    fn zero_normalize_adds_and_strips_padding() {
        let d = only_010();
        assert!(!d.accepts(&[1, 0]));
        let z = d.zero_normalize().unwrap();
        for w in [&[1u32, 0][..], &[0, 1, 0], &[0, 0, 1, 0], &[0, 0, 0, 0, 0, 1, 0]] {
            assert!(z.accepts(w), "{w:?}");
        }
        assert!(!z.accepts(&[1, 0, 0]));
        assert!(!z.accepts(&[]));
        assert!(z.is_zero_normalized());
        let again = z.zero_normalize().unwrap();
        assert!(again.equivalent(&z).unwrap());
    }

    #[test]
    fn project_equality_is_universal() {
        let p = equality().project(0).unwrap();
        assert_eq!(p.arity(), 1);
        assert!(p.equivalent(&Automaton::universal(1)).unwrap());
    }

    #[test]
    fn cylindrify_then_project_round_trips() {
        let e = equality();
        let lifted = e.cylindrify(3, &[0, 2]).unwrap();
        assert!(lifted.accepts(&encode_tuple(&[5, 99, 5])));
        let back = lifted.project(1).unwrap();
        assert!(back.equivalent(&e).unwrap());
        assert!(e.cylindrify(3, &[0, 0]).is_err());
        assert!(e.cylindrify(2, &[0, 2]).is_err());
        let same = e.cylindrify(2, &[0, 1]).unwrap();
        assert!(same.equivalent(&e).unwrap());
    }

    #[test]
    fn determinize_round_trip_and_empty() {
        let e = equality();
        assert!(Nfa::from_dfa(&e).determinize().equivalent(&e).unwrap());
        let mut empty = Nfa::new(1);
        empty.add_state(false);
        assert!(empty.determinize().is_empty());
    }

    #[test]
    fn combine_reports_overlap() {
        let u = Automaton::universal(1);
        let c = combine(&[(u.clone(), 7)]).unwrap();
        assert_eq!(c.num_states(), 1);
        assert_eq!(c.value(12), 7);
        let err = combine(&[(u.clone(), 1), (u, 2)]).unwrap_err();
        assert!(matches!(err, Error::Overlap { .. }));
    }
}
