//! Integer linear representations `value(w) = L · M_{w_1} ⋯ M_{w_t} · R`:
//! occurrence counting for synchronized relations, differences, an exact
//! zero test, and the linear representation of the Carlitz coefficients.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::automata::{Automaton, Kind};
use crate::error::{Error, Result};
use crate::logic::{parse_formula, Engine};
use crate::numeration::fib;
use crate::synth::certify_function;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinRep {
    alphabet: Vec<String>,
    l: Vec<BigInt>,
    m: Vec<Vec<Vec<BigInt>>>,
    r: Vec<BigInt>,
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn vec_mat(v: &[BigInt], m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = m.first().map_or(0, |row| row.len());
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in m[i].iter().enumerate() {
            if !y.is_zero() {
                out[j] += x * y;
            }
        }
    }
    out
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl LinRep {
    pub fn new(alphabet: Vec<String>, l: Vec<BigInt>, m: Vec<Vec<Vec<BigInt>>>, r: Vec<BigInt>) -> Result<Self> {
        let dim = l.len();
        if r.len() != dim {
            return Err(Error::InvalidArgument(format!("R has {} entries, expected {dim}", r.len())));
        }
        if m.len() != alphabet.len() {
            return Err(Error::InvalidArgument("one matrix per letter is required".into()));
        }
        for mat in &m {
            if mat.len() != dim || mat.iter().any(|row| row.len() != dim) {
                return Err(Error::InvalidArgument(format!("matrices must be {dim}x{dim}")));
            }
        }
        Ok(Self { alphabet, l, m, r })
    }

    pub fn dim(&self) -> usize {
        self.l.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn letter(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|a| a == name)
    }

    /// Value on a word given as letter indices.
    pub fn evaluate(&self, word: &[usize]) -> BigInt {
        let v = word.iter().fold(self.l.clone(), |v, &a| vec_mat(&v, &self.m[a]));
        dot(&v, &self.r)
    }

    /// Value on a word of one-character letters.
    pub fn evaluate_str(&self, word: &str) -> Result<BigInt> {
        let idx = word
            .chars()
            .map(|c| {
                self.letter(&c.to_string())
                    .ok_or_else(|| Error::InvalidArgument(format!("letter `{c}` not in the alphabet")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.evaluate(&idx))
    }

    /// Block-diagonal sum whose value is `self − other` on every word.
    pub fn subtract(&self, other: &Self) -> Result<Self> {
        if self.alphabet != other.alphabet {
            return Err(Error::InvalidArgument("alphabets differ".into()));
        }
        let (a, b) = (self.dim(), other.dim());
        let mut l = self.l.clone();
        l.extend(other.l.iter().map(|x| -x));
        let mut r = self.r.clone();
        r.extend(other.r.iter().cloned());
        let m = self
            .m
            .iter()
            .zip(&other.m)
            .map(|(x, y)| {
                let mut out = vec![vec![BigInt::zero(); a + b]; a + b];
                for i in 0..a {
                    out[i][..a].clone_from_slice(&x[i]);
                }
                for i in 0..b {
                    out[a + i][a..].clone_from_slice(&y[i]);
                }
                out
            })
            .collect();
        Self::new(self.alphabet.clone(), l, m, r)
    }

    /// A word with nonzero value, if any. The row space spanned by all
    /// `L·M_w` is built breadth-first with exact rational elimination; the
    /// representation is zero iff every spanning vector is orthogonal to `R`.
    pub fn nonzero_witness(&self) -> Option<Vec<usize>> {
        let mut basis: Vec<(usize, Vec<BigRational>)> = Vec::new();
        let mut queue: VecDeque<(Vec<BigInt>, Vec<usize>)> = VecDeque::from([(self.l.clone(), Vec::new())]);
        while let Some((v, word)) = queue.pop_front() {
            if !reduce_into(&mut basis, &v) {
                continue;
            }
            if !dot(&v, &self.r).is_zero() {
                return Some(word);
            }
            for (a, mat) in self.m.iter().enumerate() {
                let mut w = word.clone();
                w.push(a);
                queue.push_back((vec_mat(&v, mat), w));
            }
        }
        None
    }

    pub fn is_zero(&self) -> bool {
        self.nonzero_witness().is_none()
    }

    /// Text form: `linrep r letters…`, then `L`, each `M_σ`, and `R`, one
    /// row per line.
    pub fn to_text(&self) -> String {
        let row = |v: &[BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = format!("linrep {} {}\n", self.dim(), self.alphabet.join(" "));
        out += &row(&self.l);
        out.push('\n');
        for mat in &self.m {
            for r in mat {
                out += &row(r);
                out.push('\n');
            }
        }
        for x in &self.r {
            out += &format!("{x}\n");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, message: &str| Error::Format { line, message: message.into() };
        let (hline, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let mut head = header.split_whitespace();
        if head.next() != Some("linrep") {
            return Err(err(hline, "expected `linrep`"));
        }
        let dim: usize =
            head.next().and_then(|d| d.parse().ok()).ok_or_else(|| err(hline, "expected a dimension"))?;
        let alphabet: Vec<String> = head.map(String::from).collect();
        let mut row = |want: usize| -> Result<Vec<BigInt>> {
            let (n, l) = lines.next().ok_or_else(|| err(0, "unexpected end of input"))?;
            let vals = l
                .split_whitespace()
                .map(|t| t.parse::<BigInt>().map_err(|_| err(n, &format!("bad integer `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != want {
                return Err(err(n, &format!("expected {want} entries, found {}", vals.len())));
            }
            Ok(vals)
        };
        let l = row(dim)?;
        let mut m = Vec::new();
        for _ in 0..alphabet.len() {
            m.push((0..dim).map(|_| row(dim)).collect::<Result<Vec<_>>>()?);
        }
        let r = (0..dim).map(|_| row(1).map(|v| v[0].clone())).collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, l, m, r)
    }
}

impl fmt::Display for LinRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Add `v` to an echelon basis; `false` when it is already in the span.
fn reduce_into(basis: &mut Vec<(usize, Vec<BigRational>)>, v: &[BigInt]) -> bool {
    let mut v: Vec<BigRational> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    for (pivot, b) in basis.iter() {
        if !v[*pivot].is_zero() {
            let factor = v[*pivot].clone() / b[*pivot].clone();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= &factor * y;
            }
        }
    }
    match v.iter().position(|x| !x.is_zero()) {
        Some(p) => {
            // keep earlier rows reduced at the new pivot
            for (_, b) in basis.iter_mut() {
                if !b[p].is_zero() {
                    let factor = b[p].clone() / v[p].clone();
                    for (x, y) in b.iter_mut().zip(&v) {
                        *x -= &factor * y;
                    }
                }
            }
            basis.push((p, v));
            true
        }
        None => false,
    }
}

/// Occurrence counts of a 2-track relation: the value on a digit string
/// `w` over `{0,1}` is the number of `n` on the counted track with the pair
/// accepted against `[w]`.
///
/// The value is independent of how many leading zeros `w` carries: indices
/// longer than `w` are folded into `L` by summing over their excess prefix,
/// which starts with a 1 on the counted track and reads 0 on the other.
/// That sum is finite only when each value has finitely many preimages;
/// otherwise this is an error.
pub fn counting_linrep(rel: &Automaton, counted_track: usize) -> Result<LinRep> {
    if rel.arity() != 2 || rel.kind() != Kind::Dfa {
        return Err(Error::ArityMismatch { expected: 2, found: rel.arity() });
    }
    if counted_track > 1 {
        return Err(Error::TrackOutOfRange { track: counted_track, arity: 2 });
    }
    let rel = rel.zero_normalize()?;
    let co = rel.coreachable();
    let states: Vec<u32> = (0..rel.num_states() as u32).filter(|&q| co[q as usize]).collect();
    let index = |q: u32| states.iter().position(|&s| s == q);
    let dim = states.len();
    let symbol = |counted: u32, digit: u32| if counted_track == 0 { (counted << 1) | digit } else { (digit << 1) | counted };
    let mut m = vec![vec![vec![BigInt::zero(); dim]; dim]; 2];
    for (i, &q) in states.iter().enumerate() {
        for digit in 0..2u32 {
            for e in 0..2u32 {
                if let Some(j) = index(rel.next(q, symbol(e, digit))) {
                    m[digit as usize][i][j] += 1;
                }
            }
        }
    }
    let r: Vec<BigInt> =
        states.iter().map(|&q| if rel.is_accepting(q) { BigInt::one() } else { BigInt::zero() }).collect();
    let mut l = vec![BigInt::zero(); dim];
    let Some(init) = index(rel.initial()) else {
        return LinRep::new(vec!["0".into(), "1".into()], l, m, r);
    };
    l[init] = BigInt::one();
    // excess prefixes: (1,0) then any (e,0)
    let mut lead = vec![BigInt::zero(); dim];
    if let Some(j) = index(rel.next(rel.initial(), symbol(1, 0))) {
        lead[j] = BigInt::one();
    }
    let mut steps = 0;
    while lead.iter().any(|x| !x.is_zero()) {
        for (x, y) in l.iter_mut().zip(&lead) {
            *x += y;
        }
        lead = vec_mat(&lead, &m[0]);
        steps += 1;
        if steps > dim + 1 {
            return Err(Error::InvalidArgument("some value has infinitely many preimages".into()));
        }
    }
    LinRep::new(vec!["0".into(), "1".into()], l, m, r)
}

/// Digits of `n` as letter indices of a counting representation.
pub fn digits_word(n: u64, padding: usize) -> Vec<usize> {
    let mut w = vec![0usize; padding];
    w.extend(crate::numeration::encode_u64(n).digits().iter().map(|&d| d as usize));
    w
}

/// `C(u)` for a nonempty word over `{b, d}`.
pub fn carlitz_c(u: &str) -> Result<BigInt> {
    if u.is_empty() || u.chars().any(|c| c != 'b' && c != 'd') {
        return Err(Error::InvalidArgument(format!("`{u}` is not a nonempty word over {{b,d}}")));
    }
    let i = u.chars().filter(|&c| c == 'b').count();
    let j = u.len() - i;
    let (v, last) = u.split_at(u.len() - 1);
    if v.is_empty() {
        return Ok(if last == "b" { BigInt::zero() } else { BigInt::one() });
    }
    let f = BigInt::from(fib(i + 2 * j - 1));
    let c = carlitz_c(v)?;
    Ok(if last == "b" { f + c } else { f - c })
}

/// The 3-dimensional representation of `C(u)`.
pub fn carlitz_linrep() -> LinRep {
    LinRep::new(
        vec!["b".into(), "d".into()],
        ints(&[0, 0, 1]),
        vec![
            vec![ints(&[0, 1, 0]), ints(&[1, 1, 0]), ints(&[0, 1, 1])],
            vec![ints(&[0, 0, 1]), ints(&[0, 1, 1]), ints(&[1, 2, 1])],
        ],
        ints(&[1, 0, 0]),
    )
    .expect("dimensions agree")
}

/// Whether two certified synchronized functions take every value equally
/// often.
pub fn check_permutation(engine: &Engine, a: &Automaton, b: &Automaton) -> Result<bool> {
    Ok(permutation_witness(engine, a, b)?.is_none())
}

/// A value-digit string on which the occurrence counts differ, if any.
pub fn permutation_witness(engine: &Engine, a: &Automaton, b: &Automaton) -> Result<Option<Vec<usize>>> {
    for (name, rel) in [("first", a), ("second", b)] {
        if !certify_function(engine, rel)? {
            return Err(Error::Certification(format!("the {name} relation is not a total function")));
        }
    }
    let diff = counting_linrep(a, 0)?.subtract(&counting_linrep(b, 0)?)?;
    Ok(diff.nonzero_witness())
}

/// Outcome of the distinctness-transform test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinctCheck {
    pub holds: bool,
    pub failed: Option<&'static str>,
}

/// Whether `t` is the distinctness transform of `s` (both synchronized
/// functions): same range, `t` injective, first occurrences in order.
pub fn check_distinct_transform(engine: &Engine, s: &Automaton, t: &Automaton) -> Result<DistinctCheck> {
    let mut e = engine.fork();
    e.set("seq", s.clone());
    e.set("tr", t.clone());
    let first = e.relation(&parse_formula("$seq(y,n) & Ax (x<y) => ~$seq(x,n)")?)?;
    e.set("firstocc", first.into_dfa());
    let conditions = [
        ("same range", "Ax (Em $seq(m,x)) <=> (En $tr(n,x))"),
        ("injective", "~En1,n2,x n1!=n2 & $tr(n1,x) & $tr(n2,x)"),
        ("order", "Ax,y,i,j ($firstocc(x,i) & $firstocc(y,j) & i<j) => Em,n $tr(m,x) & $tr(n,y) & m<n"),
    ];
    for (name, text) in conditions {
        if !e.eval(&parse_formula(text)?)? {
            return Ok(DistinctCheck { holds: false, failed: Some(name) });
        }
    }
    Ok(DistinctCheck { holds: true, failed: None })
}
