//! Built-in relations over Fibonacci representations: validity, comparison,
//! addition, constants, constant multiplication and division, and the
//! Fibonacci-word DFAO.
//!
//! Every relation here accepts only tuples whose tracks are valid
//! Zeckendorf strings (leading zeros allowed).

use std::sync::OnceLock;

use crate::automata::{valid_dfa, Automaton, Kind, Rel};
use crate::error::{Error, Result};
use crate::numeration::encode_u64;

/// Strings without `11`.
pub fn valid() -> Automaton {
    valid_dfa().clone()
}

/// Bits of an arity-`k` symbol, track 0 first.
fn bits(s: u32, k: usize) -> Vec<u32> {
    (0..k).map(|t| (s >> (k - 1 - t)) & 1).collect()
}

/// Shared skeleton for 2-track comparisons: state tracks the comparison of
/// the prefixes read so far plus the last digit of each track.
fn comparison(accept: fn(std::cmp::Ordering) -> bool) -> Automaton {
    use std::cmp::Ordering;
    Automaton::explore(
        2,
        Kind::Dfa,
        (Ordering::Equal, 0u32, 0u32),
        |&(ord, la, lb), s| {
            let (a, b) = (s >> 1, s & 1);
            if (a == 1 && la == 1) || (b == 1 && lb == 1) {
                return None;
            }
            let ord = if ord == Ordering::Equal { a.cmp(&b) } else { ord };
            Some((ord, a, b))
        },
        move |&(ord, _, _)| accept(ord) as u32,
    )
    .minimize()
}

/// `x = y`.
pub fn eq() -> Automaton {
    comparison(|o| o.is_eq())
}

/// `x < y`.
pub fn lt() -> Automaton {
    comparison(|o| o.is_lt())
}

/// `x <= y`.
pub fn leq() -> Automaton {
    comparison(|o| o.is_le())
}

/// Addition recognizer with states pruned at `|p|, |q| > bound`.
///
/// State `(p, q)` records that `x + y - z` over the prefix read so far
/// equals `p·F_{m+2} + q·F_{m+1}`, where `m` is the length still to come.
fn add_with_bound(bound: i32) -> Automaton {
    Automaton::explore(
        3,
        Kind::Dfa,
        (0i32, 0i32, 0u32),
        move |&(p, q, last), s| {
            if s & last != 0 {
                return None;
            }
            let b = bits(s, 3);
            let d = b[0] as i32 + b[1] as i32 - b[2] as i32;
            let (np, nq) = (p + q + d, p);
            if np.abs() > bound || nq.abs() > bound {
                return None;
            }
            Some((np, nq, s))
        },
        |&(p, q, _)| (p + q == 0) as u32,
    )
    .minimize()
}

fn add_is_exact(a: &Automaton, limit: u64) -> bool {
    for x in 0..limit {
        for y in 0..limit {
            if !a.accepts_values(&[x, y, x + y]) {
                return false;
            }
            if a.accepts_values(&[x, y, x + y + 1]) || (x + y > 0 && a.accepts_values(&[x, y, x + y - 1])) {
                return false;
            }
        }
    }
    true
}

/// Built with bound 4; the bound doubles until the exhaustive check on
/// `x, y < limit` passes and the automaton is stable under doubling.
pub fn add_verified(limit: u64) -> Automaton {
    let mut bound = 4;
    loop {
        let a = add_with_bound(bound);
        let wider = add_with_bound(2 * bound);
        if a == wider && add_is_exact(&a, limit) {
            return a;
        }
        bound *= 2;
        assert!(bound <= 1 << 10, "addition recognizer did not stabilize");
    }
}

/// `x + y = z`, cached.
pub fn add() -> Automaton {
    static ADD: OnceLock<Automaton> = OnceLock::new();
    ADD.get_or_init(|| add_verified(200)).clone()
}

/// One-track DFA accepting `0*·encode(c)`.
pub fn constant(c: u64) -> Automaton {
    let digits: Vec<u32> = encode_u64(c).digits().iter().map(|&d| d as u32).collect();
    let len = digits.len();
    Automaton::explore(
        1,
        Kind::Dfa,
        0usize,
        move |&i, s| {
            if i == 0 && s == 0 {
                Some(0)
            } else if i < len && digits[i] == s {
                Some(i + 1)
            } else {
                None
            }
        },
        move |&i| (i == len) as u32,
    )
    .minimize()
}

/// `z = c·n` on tracks `(n, z)`.
pub fn const_mul(c: u64) -> Result<Automaton> {
    if c == 0 {
        return Err(Error::InvalidArgument("multiplier must be positive".into()));
    }
    let add = add();
    // acc(n, m) holds m = i·n
    let mut acc = Rel::from_atom(&eq(), &["n", "m"])?;
    for _ in 1..c {
        let step = Rel::from_atom(&add, &["m", "n", "z"])?;
        let next = acc.and(&step)?.exists("m")?;
        acc = rename(&next, "z", "m")?;
    }
    let out = rename(&acc, "m", "z")?;
    Ok(out.restrict_valid().into_dfa())
}

/// `z = ⌊n / c⌋` on tracks `(n, z)`: `c·z ≤ n < c·z + c`.
pub fn const_div(c: u64) -> Result<Automaton> {
    if c == 0 {
        return Err(Error::InvalidArgument("divisor must be positive".into()));
    }
    let mul = Rel::from_atom(&const_mul(c)?, &["z", "m"])?;
    let sum = Rel::from_atom(&add(), &["m", "r", "n"])?;
    let small = Rel::from_atom(&lt(), &["r", "k"])?.and(&Rel::from_atom(&constant(c), &["k"])?)?.exists("k")?;
    let rel = mul.and(&sum)?.and(&small)?.exists("m")?.exists("r")?;
    Ok(rel.restrict_valid().into_dfa())
}

/// Rename one variable of a relation by a diagonal through `eq`.
fn rename(r: &Rel, from: &str, to: &str) -> Result<Rel> {
    if from == to {
        return Ok(r.clone());
    }
    r.and(&Rel::from_atom(&eq(), &[from, to])?)?.exists(from)
}

/// Fibonacci word: output is the last digit of `encode(n)`; invalid
/// inputs go to a sink with output 0.
pub fn fibword() -> Automaton {
    Automaton::explore(1, Kind::Dfao, 0u32, |&last, s| (last & s == 0).then_some(s), |&last| last)
        .minimize()
}

/// Prefix of the fixed point of `0 → 01, 1 → 0`.
pub fn fibonacci_word_prefix(len: usize) -> Vec<u8> {
    let mut w = vec![0u8];
    while w.len() < len {
        w = w.iter().flat_map(|&c| if c == 0 { vec![0, 1] } else { vec![0] }).collect();
    }
    w.truncate(len);
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::encode_tuple;
    use crate::numeration::decode_u64;

    #[test]
    fn valid_examples() {
        let v = valid();
        assert!(v.accepts(&[1, 0, 0, 1, 0, 0, 0, 1]));
        assert!(v.accepts(&[]));
        assert!(!v.accepts(&[0, 1, 1, 0]));
    }

    #[test]
    fn comparisons_match_integers() {
        let (e, l, le) = (eq(), lt(), leq());
        for x in 0..120u64 {
            for y in 0..120u64 {
                assert_eq!(e.accepts_values(&[x, y]), x == y);
                assert_eq!(l.accepts_values(&[x, y]), x < y);
                assert_eq!(le.accepts_values(&[x, y]), x <= y);
            }
        }
        assert!(e.accepts_values(&[5, 5]) && l.accepts_values(&[4, 7]));
    }

    #[test]
    fn comparisons_reject_invalid_tracks() {
        // [1,0][1,0] has an invalid first track
        assert!(!leq().accepts(&[2, 2]));
        assert!(!eq().accepts(&[3, 3]));
    }

    #[test]
    fn lt_equals_additive_definition() {
        // x < y  iff  Et (t > 0 & x + t = y)
        let zero = Rel::from_atom(&constant(0), &["t"]).unwrap();
        let sum = Rel::from_atom(&add(), &["x", "t", "y"]).unwrap();
        let additive = sum.and(&zero.not()).unwrap().exists("t").unwrap().restrict_valid();
        assert!(additive.dfa().equivalent(&lt()).unwrap());
    }

    #[test]
    fn add_examples() {
        let a = add();
        // ([0,0,1],[1,1,0]) reads x = 01, y = 01, z = 10
        assert!(a.accepts(&[0b001, 0b110]));
        assert!(a.accepts_values(&[1, 1, 2]));
        assert!(!a.accepts_values(&[2, 3, 4]));
        for n in 0..1000 {
            assert!(a.accepts_values(&[0, n, n]));
        }
    }

    #[test]
    fn add_exhaustive_and_commutative() {
        let a = add_verified(2000);
        let swapped = a.reindex(3, &[1, 0, 2]).unwrap();
        assert!(swapped.equivalent(&a).unwrap());
    }

    #[test]
    fn constants() {
        for c in 0..200u64 {
            let d = constant(c);
            for n in 0..200u64 {
                assert_eq!(d.accepts_values(&[n]), n == c);
            }
            let mut padded = vec![0u32, 0];
            padded.extend(encode_tuple(&[c]));
            assert!(d.accepts(&padded));
        }
    }

    #[test]
    fn multiplication_and_division() {
        let m1 = const_mul(1).unwrap();
        let m2 = const_mul(2).unwrap();
        let m5 = const_mul(5).unwrap();
        let d2 = const_div(2).unwrap();
        let d5 = const_div(5).unwrap();
        for n in 0..150u64 {
            for z in 0..400u64 {
                assert_eq!(m1.accepts_values(&[n, z]), z == n);
                assert_eq!(m2.accepts_values(&[n, z]), z == 2 * n);
                assert_eq!(m5.accepts_values(&[n, z]), z == 5 * n);
                assert_eq!(d2.accepts_values(&[n, z]), z == n / 2);
                assert_eq!(d5.accepts_values(&[n, z]), z == n / 5);
            }
        }
        assert!(d2.accepts_values(&[7, 3]));
        assert!(m2.accepts_values(&[6, 12]));
        assert!(const_mul(0).is_err() && const_div(0).is_err());
    }

    #[test]
    fn fibword_matches_morphism() {
        let f = fibword();
        let prefix = fibonacci_word_prefix(100_000);
        for (n, &bit) in prefix.iter().enumerate() {
            assert_eq!(f.value(n as u64), bit as u32, "n = {n}");
        }
        assert_eq!((f.value(0), f.value(1), f.value(6)), (0, 1, 1));
    }

    #[test]
    fn fibword_is_last_digit() {
        let f = fibword();
        for n in 1..5000u64 {
            let d = encode_u64(n);
            assert_eq!(f.value(n), *d.digits().last().unwrap() as u32);
            assert_eq!(decode_u64(d.digits()), Some(n));
        }
    }
}
