//! Zeckendorf (Fibonacci) numeration and exact golden-ratio floors.
//!
//! Everything here is exact integer arithmetic. The Beatty-type floors
//! `⌊φn⌋`, `⌊φ²n⌋` and their rounded variants are computed through an
//! integer square root, never through floating point.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};

/// Arbitrary-precision natural number.
pub type Natural = BigUint;

/// Largest index `k` with `F_k` representable in a `u64`.
pub const MAX_FIB_INDEX_U64: usize = 93;

/// `F_k` with `F_0 = 0`, `F_1 = 1`.
pub fn fib(k: usize) -> Natural {
    let (mut a, mut b) = (Natural::zero(), Natural::one());
    for _ in 0..k {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// `F_k` as a `u64`. Panics when `k > 93`.
pub fn fib_u64(k: usize) -> u64 {
    assert!(k <= MAX_FIB_INDEX_U64, "F_{k} does not fit in u64");
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..k {
        let next = a.wrapping_add(b);
        a = b;
        b = next;
    }
    a
}

/// `L_k` with `L_0 = 2`, `L_1 = 1`.
pub fn lucas(k: usize) -> Natural {
    let (mut a, mut b) = (Natural::from(2u32), Natural::one());
    for _ in 0..k {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// `L_k` as a `u64`. Panics when `k > 91`.
pub fn lucas_u64(k: usize) -> u64 {
    assert!(k <= 91, "L_{k} does not fit in u64");
    let (mut a, mut b) = (2u64, 1u64);
    for _ in 0..k {
        let next = a.wrapping_add(b);
        a = b;
        b = next;
    }
    a
}

/// Fibonacci numbers `F_0..=F_93`.
pub fn fib_table() -> &'static [u64] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| (0..=MAX_FIB_INDEX_U64).map(fib_u64).collect())
}

/// Most-significant-first Fibonacci digit string `e_1 … e_t`.
///
/// Digit `e_i` weighs `F_{t-i+2}`, so the last digit weighs `F_2 = 1`.
/// The type itself does not force canonical form; [`encode`] always
/// produces canonical strings and [`ZeckendorfString::is_canonical`]
/// checks the invariant.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZeckendorfString(Vec<u8>);

impl ZeckendorfString {
    pub fn from_digits(digits: Vec<u8>) -> Self {
        assert!(digits.iter().all(|&d| d <= 1), "digits must be 0 or 1");
        Self(digits)
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_digits(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// No `11` factor and no leading zero.
    pub fn is_canonical(&self) -> bool {
        self.0.first().is_none_or(|&d| d == 1) && is_valid_digits(&self.0)
    }

    /// Left-pad with zeros up to `len` digits.
    pub fn padded(&self, len: usize) -> Vec<u8> {
        let mut out = vec![0u8; len.saturating_sub(self.0.len())];
        out.extend_from_slice(&self.0);
        out
    }

    pub fn value(&self) -> Natural {
        decode(&self.0)
    }
}

impl fmt::Display for ZeckendorfString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for ZeckendorfString {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "ε" {
            return Ok(Self::default());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(format!("invalid digit {other:?}")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

/// True iff the digit string contains no `11` factor (leading zeros allowed).
pub fn is_valid_digits(digits: &[u8]) -> bool {
    digits.windows(2).all(|w| !(w[0] == 1 && w[1] == 1))
}

/// Canonical Zeckendorf representation (greedy); `encode(0)` is empty.
pub fn encode(n: &Natural) -> ZeckendorfString {
    if n.is_zero() {
        return ZeckendorfString::default();
    }
    // fibs[i] = F_{i+2}
    let mut fibs = vec![Natural::one(), Natural::from(2u32)];
    while fibs.last().unwrap() <= n {
        let k = fibs.len();
        let next = &fibs[k - 1] + &fibs[k - 2];
        fibs.push(next);
    }
    fibs.pop();
    let mut rest = n.clone();
    let mut digits = Vec::with_capacity(fibs.len());
    for f in fibs.iter().rev() {
        if *f <= rest {
            rest -= f;
            digits.push(1);
        } else {
            digits.push(0);
        }
    }
    debug_assert!(rest.is_zero());
    ZeckendorfString(digits)
}

/// `u64` fast path of [`encode`].
pub fn encode_u64(n: u64) -> ZeckendorfString {
    if n == 0 {
        return ZeckendorfString::default();
    }
    let fibs = fib_table();
    // largest index i >= 2 with F_i <= n
    let mut top = 2;
    while top < MAX_FIB_INDEX_U64 && fibs[top + 1] <= n {
        top += 1;
    }
    let mut rest = n;
    let mut digits = Vec::with_capacity(top - 1);
    for i in (2..=top).rev() {
        if fibs[i] <= rest {
            rest -= fibs[i];
            digits.push(1);
        } else {
            digits.push(0);
        }
    }
    ZeckendorfString(digits)
}

/// `[x]_F` for an arbitrary digit string, canonical or not.
pub fn decode(digits: &[u8]) -> Natural {
    let t = digits.len();
    let mut acc = Natural::zero();
    // walk from the least significant digit, F_2, F_3, ...
    let (mut lo, mut hi) = (Natural::one(), Natural::from(2u32));
    for i in (0..t).rev() {
        if digits[i] == 1 {
            acc += &lo;
        }
        let next = &lo + &hi;
        lo = std::mem::replace(&mut hi, next);
    }
    acc
}

/// `u64` fast path of [`decode`]; `None` on overflow.
pub fn decode_u64(digits: &[u8]) -> Option<u64> {
    let t = digits.len();
    if t + 1 > MAX_FIB_INDEX_U64 {
        // only leading zeros may sit beyond the table
        let cut = t + 1 - MAX_FIB_INDEX_U64;
        if digits[..cut].iter().any(|&d| d != 0) {
            return None;
        }
        return decode_u64(&digits[cut..]);
    }
    let fibs = fib_table();
    let mut acc: u64 = 0;
    for (i, &d) in digits.iter().enumerate() {
        if d == 1 {
            acc = acc.checked_add(fibs[t - i + 1])?;
        }
    }
    Some(acc)
}

/// `⌊√n⌋`.
pub fn isqrt(n: &Natural) -> Natural {
    n.sqrt()
}

fn isqrt_u128(n: u128) -> u128 {
    n.sqrt()
}

/// `⌊φn⌋ = ⌊(n + √(5n²))/2⌋`, exact.
pub fn floor_phi(n: &Natural) -> Natural {
    let five_n2 = n * n * 5u32;
    (n + isqrt(&five_n2)) >> 1
}

/// `⌊φ²n⌋ = ⌊φn⌋ + n`.
pub fn floor_phi2(n: &Natural) -> Natural {
    floor_phi(n) + n
}

/// `⌊φn + 1/2⌋ = ⌊(⌊2φn⌋ + 1)/2⌋`.
pub fn floor_phi_half(n: &Natural) -> Natural {
    (floor_phi(&(n << 1)) + 1u32) >> 1
}

/// `⌊φ²n + 1/2⌋ = ⌊(⌊2φ²n⌋ + 1)/2⌋`.
pub fn floor_phi2_half(n: &Natural) -> Natural {
    (floor_phi2(&(n << 1)) + 1u32) >> 1
}

/// `u64` fast path of [`floor_phi`]; valid for `n < 2^62`.
pub fn floor_phi_u64(n: u64) -> u64 {
    let n = n as u128;
    ((n + isqrt_u128(5 * n * n)) / 2) as u64
}

pub fn floor_phi2_u64(n: u64) -> u64 {
    floor_phi_u64(n) + n
}

pub fn floor_phi_half_u64(n: u64) -> u64 {
    floor_phi_u64(2 * n).div_ceil(2)
}

pub fn floor_phi2_half_u64(n: u64) -> u64 {
    floor_phi2_u64(2 * n).div_ceil(2)
}

/// Convenience conversion used by oracles working in machine integers.
pub fn to_u64(n: &Natural) -> Option<u64> {
    n.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(n: u64) -> Natural {
        Natural::from(n)
    }

    #[test]
    fn fibonacci_and_lucas_values() {
        assert_eq!(fib(0), nat(0));
        assert_eq!(fib(9), nat(34));
        assert_eq!(fib(20), nat(6765));
        assert_eq!(lucas(0), nat(2));
        assert_eq!(lucas(1), nat(1));
        assert_eq!(lucas(7), nat(29));
        for k in 0..=MAX_FIB_INDEX_U64 {
            assert_eq!(fib(k), nat(fib_u64(k)));
        }
        for k in 0..=91 {
            assert_eq!(lucas(k), nat(lucas_u64(k)));
        }
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(&nat(43)).to_string(), "10010001");
        assert!(encode(&nat(0)).is_empty());
        assert_eq!(encode(&nat(12)).to_string(), "10101");
        assert_eq!(encode_u64(43).to_string(), "10010001");
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode(&[1, 0, 0, 1, 0, 0, 0, 1]), nat(43));
        assert_eq!(decode(&[1, 1]), nat(3));
        assert_eq!(decode(&[]), nat(0));
        assert_eq!(decode_u64(&[1, 1]), Some(3));
    }

    #[test]
    fn sqrt_and_floors() {
        assert_eq!(isqrt(&nat(0)), nat(0));
        assert_eq!(isqrt(&nat(5)), nat(2));
        assert_eq!(isqrt(&nat(500)), nat(22));
        let cases: [(u64, u64, u64, u64, u64); 4] = [
            // n, ⌊φn⌋, ⌊φ²n⌋, ⌊φn+½⌋, ⌊φ²n+½⌋
            (0, 0, 0, 0, 0),
            (1, 1, 2, 2, 3),
            (2, 3, 5, 3, 5),
            (10, 16, 26, 16, 26),
        ];
        for (n, a, b, c, d) in cases {
            assert_eq!(floor_phi(&nat(n)), nat(a));
            assert_eq!(floor_phi2(&nat(n)), nat(b));
            assert_eq!(floor_phi_half(&nat(n)), nat(c));
            assert_eq!(floor_phi2_half(&nat(n)), nat(d));
        }
        // 4φ + ½ ≈ 6.972
        assert_eq!(floor_phi_half(&nat(4)), nat(6));
    }

    #[test]
    fn floors_agree_with_high_precision_reference() {
        // φ·10^40 truncated, so ⌊φn⌋ = ⌊n·Φ/10^40⌋ unless the product sits
        // within n of a multiple of 10^40
        let phi_scaled: Natural = "16180339887498948482045868343656381177203".parse().unwrap();
        let scale = Natural::from(10u32).pow(40);
        for n in (0u64..5000).chain([1 << 40, 123_456_789_012]) {
            let approx = &phi_scaled * n / &scale;
            assert_eq!(floor_phi(&nat(n)), approx, "n = {n}");
            assert_eq!(floor_phi_u64(n), approx.to_u64().unwrap());
        }
    }

    #[test]
    fn round_trip_and_canonical_below_2_pow_20() {
        for n in 0u64..(1 << 20) {
            let s = encode_u64(n);
            assert!(s.is_canonical());
            assert_eq!(decode_u64(s.digits()), Some(n));
            assert_eq!(floor_phi2_u64(n), floor_phi_u64(n) + n);
        }
    }

    #[test]
    fn encode_strips_leading_zeros() {
        let padded = [0, 0, 1, 0, 1];
        assert_eq!(encode(&decode(&padded)).digits(), &[1, 0, 1]);
    }

    #[test]
    fn beatty_partition_covers_prefix() {
        const LIMIT: u64 = 100_000;
        let mut hit = vec![0u8; LIMIT as usize + 1];
        for n in 1.. {
            let a = floor_phi_u64(n);
            if a > LIMIT {
                break;
            }
            hit[a as usize] += 1;
        }
        for n in 1.. {
            let b = floor_phi2_u64(n);
            if b > LIMIT {
                break;
            }
            hit[b as usize] += 1;
        }
        assert!(hit[1..].iter().all(|&h| h == 1));
    }

    #[test]
    fn encode_is_order_preserving() {
        let mut prev = encode_u64(0);
        for n in 1u64..20_000 {
            let cur = encode_u64(n);
            assert!((prev.len(), prev.digits()) < (cur.len(), cur.digits()));
            prev = cur;
        }
    }
}
