//! Guess-and-check synthesis: learn a candidate automaton from oracle
//! values, then certify it with first-order queries.
//!
//! The learner targets languages invariant under leading all-zero symbols,
//! which is the case for every relation and DFAO here. For such a language
//! the words of one exact length `ℓ` determine everything shorter: the
//! residual of a prefix `p` on suffixes of length `m ≤ ℓ − |p|` is the
//! residual of `0^{ℓ−m−|p|}·p` on suffixes of length `m`. The positive
//! words of length `ℓ` are folded into a hash-consed acyclic DFA, and a
//! prefix's signature is the list of those residuals for every available
//! `m`. States are discovered breadth-first: a successor joins the unique
//! known state whose signature agrees on the common range, starts a new
//! state when none agrees, and fails as under-determined when several do.

use std::collections::VecDeque;
use std::time::Instant;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::automata::{combine, regex_compile, Automaton, Kind};
use crate::error::{Error, Result};
use crate::logic::{parse_formula, Engine};
use crate::numeration::fib_u64;

/// Default training sizes, tried in order.
pub const DEFAULT_SCHEDULE: [usize; 4] = [1 << 12, 1 << 14, 1 << 16, 1 << 18];

/// Largest number of learned states before giving up.
const MAX_STATES: usize = 4096;

/// Suffix lengths a successor must still be compared on.
const MIN_RANGE: usize = 2;

/// Largest `ℓ` with `F_{ℓ+2} ≤ n`: every `ℓ`-digit value is below `n`.
pub fn sample_length(n: usize) -> usize {
    let mut l = 0;
    while l + 3 <= 93 && fib_u64(l + 3) <= n as u64 {
        l += 1;
    }
    l
}

/// Positive words of one exact length.
#[derive(Clone, Debug)]
pub struct Sample {
    pub arity: usize,
    pub len: usize,
    pub words: Vec<Vec<u32>>,
}

impl Sample {
    pub fn new(arity: usize, len: usize) -> Self {
        Self { arity, len, words: Vec::new() }
    }

    /// Add a tuple, zero-padded on the left; tuples longer than the sample
    /// length are skipped.
    pub fn push_tuple(&mut self, values: &[u64]) {
        let w = crate::automata::encode_tuple(values);
        if w.len() <= self.len {
            let mut padded = vec![0u32; self.len - w.len()];
            padded.extend(w);
            self.words.push(padded);
        }
    }
}

/// Minimal acyclic automaton of a sample; node 0 is the empty residual and
/// node 1 the accepting leaf.
struct Dag {
    nsym: usize,
    len: usize,
    children: Vec<u32>,
    zeros: Vec<u32>,
}

impl Dag {
    fn build(sample: &Sample) -> Self {
        let nsym = 1usize << sample.arity;
        let mut words = sample.words.clone();
        words.sort_unstable();
        words.dedup();
        let mut dag = Dag { nsym, len: sample.len, children: vec![0; 2 * nsym], zeros: Vec::new() };
        let mut intern: FxHashMap<Vec<u32>, u32> = FxHashMap::default();
        let root = dag.fold(&words, 0, &mut intern);
        let mut z = root;
        dag.zeros.push(z);
        for _ in 0..sample.len {
            z = dag.child(z, 0);
            dag.zeros.push(z);
        }
        dag
    }

    fn fold(&mut self, words: &[Vec<u32>], depth: usize, intern: &mut FxHashMap<Vec<u32>, u32>) -> u32 {
        if words.is_empty() {
            return 0;
        }
        if depth == self.len {
            return 1;
        }
        let mut key = vec![0u32; self.nsym + 1];
        key[self.nsym] = depth as u32;
        let mut start = 0;
        while start < words.len() {
            let s = words[start][depth];
            let end = start + words[start..].partition_point(|w| w[depth] == s);
            key[s as usize] = self.fold(&words[start..end], depth + 1, intern);
            start = end;
        }
        if let Some(&id) = intern.get(&key) {
            return id;
        }
        let id = (self.children.len() / self.nsym) as u32;
        self.children.extend_from_slice(&key[..self.nsym]);
        intern.insert(key, id);
        id
    }

    fn child(&self, node: u32, s: u32) -> u32 {
        if node <= 1 {
            0
        } else {
            self.children[node as usize * self.nsym + s as usize]
        }
    }

    /// Residual ids of `0^{ℓ−m−|p|}·p` for `m = 0..=ℓ−|p|`.
    fn signature(&self, p: &[u32]) -> Vec<u32> {
        let top = self.len - p.len();
        (0..=top)
            .map(|m| p.iter().fold(self.zeros[top - m], |n, &s| self.child(n, s)))
            .collect()
    }
}

/// Number of accepted words of length `len`.
fn count_accepted(a: &Automaton, len: usize) -> u128 {
    let n = a.num_states();
    let mut ways = vec![0u128; n];
    ways[a.initial() as usize] = 1;
    for _ in 0..len {
        let mut next = vec![0u128; n];
        for q in 0..n {
            if ways[q] != 0 {
                for s in 0..a.num_symbols() {
                    next[a.next(q as u32, s) as usize] += ways[q];
                }
            }
        }
        ways = next;
    }
    (0..n).filter(|&q| a.is_accepting(q as u32)).map(|q| ways[q]).sum()
}

/// Learn the minimal zero-invariant DFA agreeing with a complete sample.
pub fn learn(sample: &Sample) -> Result<Automaton> {
    let dag = Dag::build(sample);
    let nsym = dag.nsym as u32;
    let mut reps: Vec<(Vec<u32>, Vec<u32>)> = vec![(Vec::new(), dag.signature(&[]))];
    let mut trans: Vec<u32> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for s in 0..nsym {
            let mut q = reps[i].0.clone();
            q.push(s);
            if q.len() + MIN_RANGE > sample.len {
                return Err(Error::Synthesis(format!(
                    "sample length {} too short to separate states (prefix length {})",
                    sample.len,
                    q.len()
                )));
            }
            let sig = dag.signature(&q);
            let matches: Vec<usize> = reps
                .iter()
                .enumerate()
                .filter(|(_, (_, r))| r.iter().zip(&sig).all(|(a, b)| a == b))
                .map(|(j, _)| j)
                .collect();
            let target = match matches.as_slice() {
                [j] => *j,
                [] => {
                    if reps.len() >= MAX_STATES {
                        return Err(Error::Synthesis(format!("more than {MAX_STATES} states")));
                    }
                    reps.push((q, sig));
                    queue.push_back(reps.len() - 1);
                    reps.len() - 1
                }
                _ => {
                    return Err(Error::Synthesis(format!(
                        "prefix of length {} matches {} states; more data needed",
                        q.len(),
                        matches.len()
                    )))
                }
            };
            let slot = i * nsym as usize + s as usize;
            if trans.len() <= slot {
                trans.resize(slot + 1, 0);
            }
            trans[slot] = target as u32;
        }
    }
    trans.resize(reps.len() * nsym as usize, 0);
    let outputs = reps.iter().map(|(_, sig)| (sig[0] == 1) as u32).collect();
    let a = Automaton::from_parts(sample.arity, Kind::Dfa, 0, outputs, trans)?.minimize();
    if !a.is_zero_normalized() {
        return Err(Error::Synthesis("hypothesis is not invariant under leading zeros".into()));
    }
    // the hypothesis must reproduce the sample exactly at length ℓ
    let mut distinct = sample.words.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if count_accepted(&a, sample.len) != distinct.len() as u128 || !distinct.iter().all(|w| a.accepts(w)) {
        return Err(Error::Synthesis("hypothesis disagrees with the sample".into()));
    }
    Ok(a)
}

/// Learn from a membership oracle on all words of length `bound`; the
/// language must be invariant under leading zero symbols.
pub fn guess_dfa(arity: usize, bound: usize, member: impl Fn(&[u32]) -> bool) -> Result<Automaton> {
    let nsym = 1u64 << arity;
    let total = nsym.checked_pow(bound as u32).filter(|&t| t <= 1 << 24);
    let Some(total) = total else {
        return Err(Error::InvalidArgument("membership sample too large".into()));
    };
    let mut sample = Sample::new(arity, bound);
    let mut w = vec![0u32; bound];
    for code in 0..total {
        let mut c = code;
        for i in (0..bound).rev() {
            w[i] = (c % nsym) as u32;
            c /= nsym;
        }
        if member(&w) {
            sample.words.push(w.clone());
        }
    }
    learn(&sample)
}

fn nonnegative(values: &[i128]) -> Result<Vec<u64>> {
    values
        .iter()
        .enumerate()
        .map(|(n, &v)| {
            u64::try_from(v).map_err(|_| Error::Synthesis(format!("value {v} at n = {n} is not a natural number")))
        })
        .collect()
}

/// Synchronized relation `(n, f(n))` learned from `f(0..N)`.
pub fn guess_synchronized(values: &[i128]) -> Result<Automaton> {
    let vals = nonnegative(values)?;
    let len = sample_length(vals.len());
    let limit = fib_u64(len + 2);
    let mut sample = Sample::new(2, len);
    for n in 0..limit {
        sample.push_tuple(&[n, vals[n as usize]]);
    }
    learn(&sample)
}

/// DFAO for a finite-range sequence, from one learned classifier per value.
pub fn guess_dfao(values: &[i128]) -> Result<Automaton> {
    let vals = nonnegative(values)?;
    let len = sample_length(vals.len());
    let limit = fib_u64(len + 2) as usize;
    let mut range: Vec<u64> = vals[..limit].to_vec();
    range.sort_unstable();
    range.dedup();
    if range.len() > 64 || range.iter().any(|&v| v > u32::MAX as u64 - 1) {
        return Err(Error::Synthesis("range too large for an output automaton".into()));
    }
    let mut parts = Vec::new();
    for &v in &range {
        let mut sample = Sample::new(1, len);
        for (n, &x) in vals.iter().enumerate().take(limit) {
            if x == v {
                sample.push_tuple(&[n as u64]);
            }
        }
        parts.push((learn(&sample)?, v as u32));
    }
    Ok(combine(&parts)?.minimize())
}

/// A certificate: queries over a candidate bound to `$cand`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Certificate {
    /// Totality and uniqueness only.
    Function,
    /// `a(n) = n` for `n ≤ 1`, `x·F_{j+1} = a(n) + y·a(n − F_j)`.
    Fibonacci { x: u64, y: u64 },
    /// `F_{j+1} = b(n) + b(b(n − F_j))`.
    Nested,
    /// `L_{j+1} = a(n) + a(n − L_j)` for `L_j < n ≤ L_{j+1}`, `j ≥ 1`.
    Lucas,
    /// Strictly increasing, `0 ↦ 0`, and complementary to `n ↦ z(n) + n`.
    Wythoff,
}

fn mul(c: u64, v: &str) -> String {
    if c == 1 {
        v.to_string()
    } else {
        format!("{c}*{v}")
    }
}

impl Certificate {
    pub fn name(&self) -> String {
        match self {
            Certificate::Function => "function".into(),
            Certificate::Fibonacci { x, y } => format!("fibonacci({x},{y})"),
            Certificate::Nested => "nested".into(),
            Certificate::Lucas => "lucas".into(),
            Certificate::Wythoff => "wythoff".into(),
        }
    }

    /// Named closed formulas; all must be TRUE.
    pub fn queries(&self) -> Vec<(String, String)> {
        let mut q = vec![
            ("at_least_one".to_string(), "An Ex $cand(n,x)".to_string()),
            ("at_most_one".to_string(), "~En,x1,x2 x1!=x2 & $cand(n,x1) & $cand(n,x2)".to_string()),
        ];
        let base = ("base".to_string(), "$cand(0,0) & $cand(1,1)".to_string());
        match *self {
            Certificate::Function => {}
            Certificate::Fibonacci { x, y } => {
                q.push(base);
                q.push((
                    "recurrence".into(),
                    format!(
                        "Ak,x,y,z,t ($trapfib(k,x,y) & $cand(k,z) & $cand(k-x,t)) => {}=z+{}",
                        mul(x, "y"),
                        mul(y, "t")
                    ),
                ));
            }
            Certificate::Nested => {
                q.push(base);
                q.push((
                    "recurrence".into(),
                    "Ak,x,y,z,t,u ($trapfib(k,x,y) & $cand(k,z) & $cand(k-x,t) & $cand(t,u)) => y=z+u".into(),
                ));
            }
            Certificate::Lucas => {
                q.push(base);
                q.push((
                    "recurrence".into(),
                    "Ak,x,y,z,t ($luctrap(k,x,y) & $cand(k,z) & $cand(k-x,t)) => y=z+t".into(),
                ));
            }
            Certificate::Wythoff => {
                q.push(("zero".into(), "$cand(0,0)".into()));
                q.push(("increasing".into(), "An,x,y ($cand(n,x) & $cand(n+1,y)) => x<y".into()));
                q.push((
                    "complementary".into(),
                    "Az (z>0) => ((Em,x m>0 & $cand(m,x) & z=x) <=> ~(Em,x m>0 & $cand(m,x) & z=x+m))".into(),
                ));
            }
        }
        q
    }
}

/// Adjacent Fibonacci pairs `(F_j, F_{j+1})`, `j ≥ 2`.
pub const ADJFIB: &str = "[0,0]*[0,1][1,0][0,0]*";

/// Adjacent Lucas pairs `(L_j, L_{j+1})`, `j ≥ 1`.
pub const ADJLUC: &str = "[0,0]*([0,1][0,0][1,0]|[1,1][0,0][0,1]|[0,1][1,0][0,1][1,0][0,0]*)";

/// Make sure the bracketing helpers used by certificates exist.
pub fn install_helpers(engine: &mut Engine) -> Result<()> {
    if !engine.catalog().contains("adjfib") {
        engine.set("adjfib", regex_compile(ADJFIB, 2)?);
    }
    if !engine.catalog().contains("trapfib") {
        let r = engine.relation(&parse_formula("$adjfib(x,y) & x<k & y>=k")?)?;
        engine.set("trapfib", r.into_dfa());
    }
    if !engine.catalog().contains("adjluc") {
        engine.set("adjluc", regex_compile(ADJLUC, 2)?);
    }
    if !engine.catalog().contains("luctrap") {
        let r = engine.relation(&parse_formula("$adjluc(x,y) & x<k & y>=k")?)?;
        engine.set("luctrap", r.into_dfa());
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct QueryOutcome {
    pub name: String,
    pub formula: String,
    pub result: bool,
    pub millis: u128,
}

/// Run a certificate against a candidate relation.
pub fn certify(engine: &Engine, candidate: &Automaton, cert: Certificate) -> Result<Vec<QueryOutcome>> {
    if candidate.kind() != Kind::Dfa || candidate.arity() != 2 {
        return Err(Error::InvalidArgument("certificates apply to 2-track relations".into()));
    }
    let mut e = engine.fork();
    install_helpers(&mut e)?;
    // canonical form, so the outcome cannot depend on state numbering
    e.set("cand", candidate.minimize());
    let mut out = Vec::new();
    for (name, text) in cert.queries() {
        let start = Instant::now();
        let result = e.eval(&parse_formula(&text)?)?;
        out.push(QueryOutcome { name, formula: text, result, millis: start.elapsed().as_millis() });
        if !result {
            break;
        }
    }
    Ok(out)
}

/// Totality and uniqueness.
pub fn certify_function(engine: &Engine, candidate: &Automaton) -> Result<bool> {
    Ok(certify(engine, candidate, Certificate::Function)?.iter().all(|q| q.result))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Certified,
    Exhausted,
}

#[derive(Clone, Debug, Serialize)]
pub struct Attempt {
    pub training_bound: usize,
    pub sample_length: usize,
    pub outcome: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SynthesisReport {
    pub target: String,
    pub certificate: String,
    pub verdict: Verdict,
    pub training_bound: usize,
    pub states: Option<usize>,
    pub queries: Vec<QueryOutcome>,
    pub attempts: Vec<Attempt>,
    /// Candidate in the automaton text format.
    pub candidate: Option<String>,
    #[serde(skip)]
    pub automaton: Option<Automaton>,
}

impl SynthesisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

/// Guess from `oracle(N)` for each `N` of the schedule until the
/// certificate holds and the candidate replays the training data.
pub fn synthesize_certified(
    engine: &Engine,
    target: &str,
    oracle: &dyn Fn(usize) -> Vec<i128>,
    cert: Certificate,
    schedule: &[usize],
) -> Result<SynthesisReport> {
    let mut report = SynthesisReport {
        target: target.to_string(),
        certificate: cert.name(),
        verdict: Verdict::Exhausted,
        training_bound: 0,
        states: None,
        queries: Vec::new(),
        attempts: Vec::new(),
        candidate: None,
        automaton: None,
    };
    for &n in schedule {
        let values = oracle(n);
        let len = sample_length(n);
        let mut attempt = Attempt { training_bound: n, sample_length: len, outcome: String::new() };
        let cand = match guess_synchronized(&values) {
            Ok(c) => c,
            Err(e) => {
                attempt.outcome = e.to_string();
                report.attempts.push(attempt);
                continue;
            }
        };
        let queries = certify(engine, &cand, cert)?;
        let passed = queries.iter().all(|q| q.result);
        report.queries = queries;
        report.training_bound = n;
        report.states = Some(cand.live_state_count());
        if !passed {
            let failed = report.queries.last().map(|q| q.name.clone()).unwrap_or_default();
            attempt.outcome = format!("query {failed} returned FALSE");
            report.attempts.push(attempt);
            continue;
        }
        if let Some(bad) = (0..n).find(|&i| !cand.accepts_values(&[i as u64, values[i] as u64])) {
            attempt.outcome = format!("replay mismatch at n = {bad}");
            report.attempts.push(attempt);
            continue;
        }
        attempt.outcome = "certified".into();
        report.attempts.push(attempt);
        report.verdict = Verdict::Certified;
        report.candidate = Some(cand.to_string());
        report.automaton = Some(cand);
        return Ok(report);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith;
    use crate::numeration::{decode_u64, floor_phi_u64, is_valid_digits};
    use crate::seqs;

    fn digits(w: &[u32]) -> Vec<u8> {
        w.iter().map(|&s| s as u8).collect()
    }

    #[test]
    fn sample_lengths() {
        assert_eq!(sample_length(1 << 16), 22);
        assert_eq!(sample_length(1 << 18), 25);
        assert_eq!(sample_length(3), 2);
    }

    #[test]
    fn learns_even_numbers() {
        let even = guess_dfa(1, 14, |w| {
            let d = digits(w);
            is_valid_digits(&d) && decode_u64(&d).unwrap().is_multiple_of(2)
        })
        .unwrap();
        let e = Engine::default();
        let built = e.relation(&parse_formula("Ek n=2*k").unwrap()).unwrap();
        assert!(even.equivalent(built.dfa()).unwrap());
    }

    #[test]
    fn learns_trivial_languages() {
        let all = guess_dfa(1, 10, |_| true).unwrap();
        assert_eq!(all.num_states(), 1);
        let valid = guess_dfa(1, 12, |w| is_valid_digits(&digits(w))).unwrap();
        assert!(valid.equivalent(&arith::valid()).unwrap());
    }

    #[test]
    fn identity_and_floor_phi() {
        let id: Vec<i128> = (0..1 << 12).collect();
        let g = guess_synchronized(&id).unwrap();
        assert!(g.equivalent(&arith::eq()).unwrap());
        let phi: Vec<i128> = (0..1u64 << 14).map(|n| floor_phi_u64(n) as i128).collect();
        let g = guess_synchronized(&phi).unwrap();
        for n in 0..5000u64 {
            assert!(g.accepts_values(&[n, floor_phi_u64(n)]));
            assert!(!g.accepts_values(&[n, floor_phi_u64(n) + 1]));
        }
    }

    #[test]
    fn occurrence_dfao() {
        let c: Vec<i128> = seqs::count_c_table(1 << 14).into_iter().map(i128::from).collect();
        let d = guess_dfao(&c).unwrap();
        let got: Vec<u32> = (0..6).map(|n| d.value(n)).collect();
        assert_eq!(got, [1, 2, 1, 0, 2, 0]);
        for (n, &v) in c.iter().enumerate() {
            assert_eq!(d.value(n as u64) as i128, v);
        }
    }

    #[test]
    fn constant_and_mod_dfaos() {
        let d = guess_dfao(&vec![3i128; 1 << 12]).unwrap();
        // the last digit is tracked to send invalid inputs to the 0 sink
        assert_eq!(d.live_state_count(), 2);
        let m3: Vec<i128> = (0..1 << 14).map(|n| n % 3).collect();
        let d = guess_dfao(&m3).unwrap();
        assert_eq!(d.live_state_count(), 18);
        assert_eq!(d.value(7), 1);
    }

    #[test]
    fn negative_values_are_rejected() {
        let a32 = seqs::a_xy_table(3, 2, 1 << 12);
        assert!(matches!(guess_synchronized(&a32), Err(Error::Synthesis(_))));
    }

    #[test]
    fn adjacent_lucas_pairs() {
        let pairs = regex_compile(ADJLUC, 2).unwrap();
        let lucas: Vec<u64> = (1..25).map(crate::numeration::lucas_u64).collect();
        for x in 0..2000u64 {
            for y in 0..2000u64 {
                let expected = lucas.windows(2).any(|w| w[0] == x && w[1] == y);
                assert_eq!(pairs.accepts_values(&[x, y]), expected, "({x},{y})");
            }
        }
    }

    #[test]
    fn function_certificates() {
        let e = Engine::default();
        assert!(certify_function(&e, &arith::eq()).unwrap());
        // accepts (0,0) and (0,1) besides the identity
        let r = e.relation(&parse_formula("x=n | (n=0 & x=1)").unwrap()).unwrap();
        let q = certify(&e, r.dfa(), Certificate::Function).unwrap();
        assert_eq!(q.last().unwrap().name, "at_most_one");
        assert!(!q.last().unwrap().result);
    }

    #[test]
    fn a105774_pipeline() {
        let e = Engine::default();
        let oracle = |n: usize| seqs::a105774_table(n).into_iter().map(i128::from).collect::<Vec<_>>();
        let report =
            synthesize_certified(&e, "a105774", &oracle, Certificate::Fibonacci { x: 1, y: 1 }, &DEFAULT_SCHEDULE)
                .unwrap();
        assert!(report.is_certified(), "{}", report.to_json());
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["verdict"], "Certified");
    }
}
