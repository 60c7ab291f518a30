//! Exact oracles for the sequences studied here. They serve as synthesis
//! targets and as ground truth for every automaton built from them.
//!
//! The letters `b`, `c`, `d` are overloaded in the literature around
//! A105774; [`NAMES`] fixes one oracle name per meaning and the rest of the
//! crate only uses those names.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::numeration::{
    fib, fib_table, fib_u64, floor_phi2_half_u64, floor_phi2_u64, floor_phi_half_u64, floor_phi_u64, lucas,
    lucas_u64,
};

/// Oracle names with a one-line meaning each.
pub const NAMES: &[(&str, &str)] = &[
    ("a105774", "a(n) = F_{j+1} - a(n - F_j) for F_j < n <= F_{j+1}"),
    ("a21", "a_{2,1}(n) = 2 F_{j+1} - a_{2,1}(n - F_j)"),
    ("a32", "a_{3,2}(n) = 3 F_{j+1} - 2 a_{3,2}(n - F_j)"),
    ("nested_b", "b(n) = F_{j+1} - b(b(n - F_j))"),
    ("lucas_variant", "a(n) = L_{j+1} - a(n - L_j) for L_j < n <= L_{j+1}"),
    ("count_c", "number of m with a(m) = n"),
    ("p0", "positions of 0 in count_c"),
    ("p1", "positions of 1 in count_c"),
    ("p2", "positions of 2 in count_c"),
    ("sorted_a", "values of a in ascending order"),
    ("diff_d", "sorted_a(n+1) - sorted_a(n)"),
    ("distinct", "distinctness transform of a"),
    ("run_lengths", "run-length encoding of a"),
    ("w", "least m with a(m) >= n"),
    ("s", "a(F_n)"),
    ("t", "a(L_n)"),
    ("beatty_b", "floor(phi n)"),
    ("beatty_d", "floor(phi^2 n)"),
    ("comp_c", "floor(phi^2 n + 1/2)"),
    ("comp_x", "a(beatty_b(n)) - beatty_b(a(n))"),
    ("comp_d", "comp_c(a(n)) - a(beatty_b(n)) - a(n)"),
    ("a007067", "floor(phi n + 1/2)"),
    ("a007064", "n + 1 + floor(phi (2n+1)) / 2"),
    ("a004937", "floor(phi^2 n + 1/2)"),
    ("a003623", "floor(phi floor(phi^2 n))"),
    ("fibword", "Fibonacci word 0100101001001..."),
];

/// `j ≥ 2` with `F_j < n ≤ F_{j+1}`, for `n ≥ 2`.
pub fn fib_bracket(n: u64) -> usize {
    debug_assert!(n >= 2);
    let f = fib_table();
    let mut j = 2;
    while f[j + 1] < n {
        j += 1;
    }
    j
}

/// `j ≥ 1` with `L_j < n ≤ L_{j+1}`, for `n ≥ 2`.
pub fn lucas_bracket(n: u64) -> usize {
    debug_assert!(n >= 2);
    let mut j = 1;
    while lucas_u64(j + 1) < n {
        j += 1;
    }
    j
}

/// A105774, evaluated by unrolling the recurrence with alternating signs.
pub fn a105774(n: u64) -> u64 {
    let f = fib_table();
    let (mut n, mut acc, mut sign) = (n, 0i128, 1i128);
    while n > 1 {
        let j = fib_bracket(n);
        acc += sign * f[j + 1] as i128;
        n -= f[j];
        sign = -sign;
    }
    (acc + sign * n as i128) as u64
}

/// `a(0..len)` by the recurrence, each term from an earlier one.
pub fn a105774_table(len: usize) -> Vec<u64> {
    let f = fib_table();
    let mut a = Vec::with_capacity(len);
    let mut j = 2;
    for n in 0..len as u64 {
        let v = if n <= 1 {
            n
        } else {
            while f[j + 1] < n {
                j += 1;
            }
            f[j + 1] - a[(n - f[j]) as usize]
        };
        a.push(v);
    }
    a
}

/// `a_{x,y}(n) = x·F_{j+1} − y·a_{x,y}(n − F_j)`, `a_{x,y}(n) = n` for `n ≤ 1`.
pub fn a_xy(x: i128, y: i128, n: u64) -> i128 {
    let f = fib_table();
    let (mut n, mut acc, mut coef) = (n, 0i128, 1i128);
    while n > 1 {
        let j = fib_bracket(n);
        acc += coef * x * f[j + 1] as i128;
        coef *= -y;
        n -= f[j];
    }
    acc + coef * n as i128
}

pub fn a_xy_table(x: i128, y: i128, len: usize) -> Vec<i128> {
    let f = fib_table();
    let mut a: Vec<i128> = Vec::with_capacity(len);
    let mut j = 2;
    for n in 0..len as u64 {
        let v = if n <= 1 {
            n as i128
        } else {
            while f[j + 1] < n {
                j += 1;
            }
            x * f[j + 1] as i128 - y * a[(n - f[j]) as usize]
        };
        a.push(v);
    }
    a
}

/// `b(n) = F_{j+1} − b(b(n − F_j))`.
pub fn nested_b_table(len: usize) -> Vec<u64> {
    let f = fib_table();
    let mut b: Vec<u64> = Vec::with_capacity(len);
    let mut j = 2;
    for n in 0..len as u64 {
        let v = if n <= 1 {
            n
        } else {
            while f[j + 1] < n {
                j += 1;
            }
            let inner = b[(n - f[j]) as usize];
            assert!(inner < n, "nested recursion reached b({inner}) while computing b({n})");
            f[j + 1] - b[inner as usize]
        };
        b.push(v);
    }
    b
}

pub fn nested_b(n: u64) -> u64 {
    nested_b_table(n as usize + 1)[n as usize]
}

/// Lucas-indexed variant: `a(0) = 0`, `a(1) = 1`, and
/// `a(n) = L_{j+1} − a(n − L_j)` for `L_j < n ≤ L_{j+1}`, `j ≥ 1`.
pub fn lucas_variant_table(len: usize) -> Vec<u64> {
    let mut a: Vec<u64> = Vec::with_capacity(len);
    let mut j = 1;
    let (mut lj, mut lj1) = (lucas_u64(1), lucas_u64(2));
    for n in 0..len as u64 {
        let v = if n <= 1 {
            n
        } else {
            while lj1 < n {
                j += 1;
                lj = lj1;
                lj1 = lucas_u64(j + 1);
            }
            lj1 - a[(n - lj) as usize]
        };
        a.push(v);
    }
    a
}

pub fn lucas_variant(n: u64) -> u64 {
    let (mut n, mut acc, mut sign) = (n, 0i128, 1i128);
    while n > 1 {
        let j = lucas_bracket(n);
        acc += sign * lucas_u64(j + 1) as i128;
        n -= lucas_u64(j);
        sign = -sign;
    }
    (acc + sign * n as i128) as u64
}

/// `⌊(⌊φn⌋ + 2n)/5⌋`, a lower bound on `a(n)`.
pub fn a_lower_bound(n: u64) -> u64 {
    (floor_phi_u64(n) + 2 * n) / 5
}

/// Occurrence counts `c(0..len)`. Every occurrence of `v` sits below
/// `3v + 3` because of the lower bound, which is asserted on the scanned
/// window.
pub fn count_c_table(len: usize) -> Vec<u8> {
    let window = 3 * len + 3;
    let a = a105774_table(window + 1);
    let mut c = vec![0u8; len];
    for (m, &v) in a.iter().enumerate() {
        assert!(v >= a_lower_bound(m as u64), "lower bound fails at {m}");
        if (v as usize) < len {
            c[v as usize] += 1;
        }
    }
    // beyond the window a(m) > a_lower_bound(window) ≥ len
    assert!(a_lower_bound(window as u64 + 1) >= len as u64);
    c
}

pub fn count_c(n: u64) -> u8 {
    count_c_table(n as usize + 1)[n as usize]
}

/// First `count` indices where `c` equals `kind` (0, 1 or 2).
pub fn positions(kind: u8, count: usize) -> Vec<u64> {
    let mut len = 4 * count + 16;
    loop {
        let c = count_c_table(len);
        let p: Vec<u64> = (0..len).filter(|&i| c[i] == kind).map(|i| i as u64).take(count).collect();
        if p.len() == count {
            return p;
        }
        len *= 2;
    }
}

/// Values of `a(0..m)` below which no later term can fall.
fn final_below(m: usize) -> u64 {
    a_lower_bound(m as u64)
}

/// First `count` terms of `a` sorted ascending.
pub fn sorted_a(count: usize) -> Vec<u64> {
    let mut m = 2 * count + 16;
    loop {
        let mut a = a105774_table(m);
        let cutoff = final_below(m);
        a.retain(|&v| v < cutoff);
        if a.len() >= count {
            a.sort_unstable();
            a.truncate(count);
            return a;
        }
        m *= 2;
    }
}

/// `sorted_a(n+1) − sorted_a(n)` for `n < count`.
pub fn diff_d(count: usize) -> Vec<u64> {
    let s = sorted_a(count + 1);
    s.windows(2).map(|w| w[1] - w[0]).collect()
}

/// First `count` terms of the distinctness transform of `a`.
pub fn distinct_transform(count: usize) -> Vec<u64> {
    let mut m = 2 * count + 16;
    loop {
        let a = a105774_table(m);
        let mut seen = rustc_hash::FxHashSet::default();
        let out: Vec<u64> = a.into_iter().filter(|v| seen.insert(*v)).take(count).collect();
        if out.len() == count {
            return out;
        }
        m *= 2;
    }
}

/// Lengths of the first `count` maximal runs of equal consecutive terms.
pub fn run_lengths(count: usize) -> Vec<u64> {
    let mut m = 2 * count + 16;
    loop {
        let a = a105774_table(m);
        let mut runs = Vec::new();
        let mut start = 0;
        for i in 1..a.len() {
            if a[i] != a[i - 1] {
                runs.push((i - start) as u64);
                start = i;
            }
        }
        // the final run may continue past the prefix
        if runs.len() >= count {
            runs.truncate(count);
            return runs;
        }
        m *= 2;
    }
}

/// `w(0..len)`: least `m` with `a(m) ≥ n`.
pub fn w_table(len: usize) -> Vec<u64> {
    let a = a105774_table(3 * len + 4);
    let mut w = Vec::with_capacity(len);
    let mut m = 0;
    for n in 0..len as u64 {
        while a[m] < n {
            m += 1;
        }
        w.push(m as u64);
    }
    w
}

pub fn w(n: u64) -> u64 {
    w_table(n as usize + 1)[n as usize]
}

/// `s(n) = a(F_n)`.
pub fn s(n: usize) -> u64 {
    a105774(fib_u64(n))
}

/// `t(n) = a(L_n)`.
pub fn t(n: usize) -> u64 {
    a105774(lucas_u64(n))
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn sign_pow(e: usize) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `L_n/10 + F_n/2 − (−1)^{n/2}/5` (even `n`), `… + 2(−1)^{(n−1)/2}/5` (odd `n`).
pub fn s_closed_form(n: usize) -> BigRational {
    let l = BigRational::from_integer(BigInt::from(lucas(n)));
    let f = BigRational::from_integer(BigInt::from(fib(n)));
    let tail = if n.is_multiple_of(2) { ratio(-sign_pow(n / 2), 5) } else { ratio(2 * sign_pow((n - 1) / 2), 5) };
    l * ratio(1, 10) + f * ratio(1, 2) + tail
}

/// `3L_n/10 + 3F_n/2 + 2(−1)^{n/2}/5` (even `n`), `… + (−1)^{(n−1)/2}/5` (odd `n`).
pub fn t_closed_form(n: usize) -> BigRational {
    let l = BigRational::from_integer(BigInt::from(lucas(n)));
    let f = BigRational::from_integer(BigInt::from(fib(n)));
    let tail = if n.is_multiple_of(2) { ratio(2 * sign_pow(n / 2), 5) } else { ratio(sign_pow((n - 1) / 2), 5) };
    l * ratio(3, 10) + f * ratio(3, 2) + tail
}

/// `true` when the rational is the integer `v`.
pub fn rational_equals(r: &BigRational, v: u64) -> bool {
    r.is_integer() && r.to_integer() == BigInt::from(v)
}

/// `x(n) = a(⌊φn⌋) − ⌊φ a(n)⌋`.
pub fn comp_x(n: u64) -> i64 {
    a105774(floor_phi_u64(n)) as i64 - floor_phi_u64(a105774(n)) as i64
}

/// `d(n) = ⌊φ² a(n) + 1/2⌋ − a(⌊φn⌋) − a(n)`.
pub fn comp_d(n: u64) -> i64 {
    let an = a105774(n);
    floor_phi2_half_u64(an) as i64 - a105774(floor_phi_u64(n)) as i64 - an as i64
}

/// Positions `n > 0` with `a(m) > a(n)` for every `m > n`, for `n ≤ limit`.
pub fn suffix_minima(limit: usize) -> Vec<bool> {
    let m = 3 * limit + 16;
    let a = a105774_table(m + 1);
    let tail_floor = a_lower_bound(m as u64 + 1);
    let mut out = vec![false; limit + 1];
    let mut later_min = u64::MAX;
    for n in (1..=m).rev() {
        if n <= limit {
            assert!(a[n] < tail_floor, "window too small at {n}");
            out[n] = a[n] < later_min;
        }
        later_min = later_min.min(a[n]);
    }
    out
}

/// `a007064(n) = n + 1 + ⌊⌊φ(2n+1)⌋/2⌋`.
pub fn a007064(n: u64) -> u64 {
    n + 1 + floor_phi_u64(2 * n + 1) / 2
}

/// `a003623(n) = ⌊φ⌊φ²n⌋⌋`.
pub fn a003623(n: u64) -> u64 {
    floor_phi_u64(floor_phi2_u64(n))
}

/// Parity of the number of 1s in `encode(n)`.
pub fn ones_parity(n: u64) -> u64 {
    crate::numeration::encode_u64(n).digits().iter().map(|&d| d as u64).sum::<u64>() % 2
}

/// First `len` values of a named oracle, as signed integers.
pub fn table(name: &str, len: usize) -> Option<Vec<i128>> {
    let map = |v: Vec<u64>| v.into_iter().map(|x| x as i128).collect::<Vec<_>>();
    let per = |f: &dyn Fn(u64) -> u64| (0..len as u64).map(|n| f(n) as i128).collect::<Vec<_>>();
    Some(match name {
        "a105774" => map(a105774_table(len)),
        "a21" => a_xy_table(2, 1, len),
        "a32" => a_xy_table(3, 2, len),
        "nested_b" => map(nested_b_table(len)),
        "lucas_variant" => map(lucas_variant_table(len)),
        "count_c" => count_c_table(len).into_iter().map(|x| x as i128).collect(),
        "p0" => map(positions(0, len)),
        "p1" => map(positions(1, len)),
        "p2" => map(positions(2, len)),
        "sorted_a" => map(sorted_a(len)),
        "diff_d" => map(diff_d(len)),
        "distinct" => map(distinct_transform(len)),
        "run_lengths" => map(run_lengths(len)),
        "w" => map(w_table(len)),
        "s" => (0..len).map(|n| s(n) as i128).collect(),
        "t" => (0..len).map(|n| t(n) as i128).collect(),
        "beatty_b" => per(&floor_phi_u64),
        "beatty_d" => per(&floor_phi2_u64),
        "comp_c" | "a004937" => per(&floor_phi2_half_u64),
        "comp_x" => (0..len as u64).map(|n| comp_x(n) as i128).collect(),
        "comp_d" => (0..len as u64).map(|n| comp_d(n) as i128).collect(),
        "a007067" => per(&floor_phi_half_u64),
        "a007064" => per(&a007064),
        "a003623" => per(&a003623),
        "fibword" => map(crate::arith::fibonacci_word_prefix(len).into_iter().map(u64::from).collect()),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const A_TABLE: [u64; 21] = [0, 1, 1, 2, 4, 4, 7, 7, 6, 12, 12, 11, 9, 9, 20, 20, 19, 17, 17, 14, 14];

    #[test]
    fn a105774_prefix() {
        assert_eq!(a105774_table(21), A_TABLE);
        for (n, &v) in A_TABLE.iter().enumerate() {
            assert_eq!(a105774(n as u64), v);
        }
        assert_eq!((a105774(0), a105774(9), a105774(20)), (0, 12, 14));
    }

    #[test]
    fn recurrence_self_check() {
        let a = a105774_table(100_001);
        for n in 2..=100_000u64 {
            // bracket recomputed by a plain scan
            let mut j = 2;
            while !(fib_u64(j) < n && n <= fib_u64(j + 1)) {
                j += 1;
            }
            assert_eq!(a[n as usize], fib_u64(j + 1) - a[(n - fib_u64(j)) as usize]);
        }
        for n in (0..100_000u64).step_by(997) {
            assert_eq!(a105774(n), a[n as usize]);
        }
    }

    #[test]
    fn bounds_and_parity() {
        let a = a105774_table(100_001);
        for (n, &v) in a.iter().enumerate() {
            let n = n as u64;
            assert!(a_lower_bound(n) <= v && v <= floor_phi_u64(n), "n = {n}");
            assert_eq!(v % 2, floor_phi_u64(n) % 2);
        }
    }

    #[test]
    fn generalized_recurrence() {
        assert_eq!(a_xy(1, 1, 9), 12);
        assert_eq!(a_xy(2, 1, 1), 1);
        assert_eq!(a_xy(2, 1, 2), 3);
        let base = a105774_table(5000);
        let one = a_xy_table(1, 1, 5000);
        for n in 0..5000 {
            assert_eq!(one[n], base[n] as i128);
        }
        let t32 = a_xy_table(3, 2, 3000);
        for n in (0..3000).step_by(7) {
            assert_eq!(a_xy(3, 2, n as u64), t32[n]);
        }
    }

    #[test]
    fn nested_prefix() {
        assert_eq!((nested_b(1), nested_b(2), nested_b(3)), (1, 1, 2));
        let b = nested_b_table(10_000);
        for n in 2..10_000u64 {
            let j = fib_bracket(n);
            assert_eq!(b[n as usize], fib_u64(j + 1) - b[b[(n - fib_u64(j)) as usize] as usize]);
        }
    }

    #[test]
    fn lucas_variant_prefix() {
        let a = lucas_variant_table(12);
        assert_eq!(a, [0, 1, 2, 1, 3, 6, 5, 6, 10, 9, 10, 8]);
        let big = lucas_variant_table(10_001);
        for n in 2..=10_000u64 {
            let mut j = 1;
            while !(lucas_u64(j) < n && n <= lucas_u64(j + 1)) {
                j += 1;
            }
            assert_eq!(big[n as usize], lucas_u64(j + 1) - big[(n - lucas_u64(j)) as usize]);
            assert_eq!(lucas_variant(n), big[n as usize]);
        }
    }

    #[test]
    fn lucas_variant_repeats_at_distance_two() {
        // a(n) = a(n-2) exactly when n = ⌊n'(φ+2)⌋ for some n' ≥ 1
        let a = lucas_variant_table(20_000);
        let marks: std::collections::HashSet<u64> =
            (1..10_000u64).map(|k| floor_phi_u64(k) + 2 * k).collect();
        for n in 2..20_000u64 {
            assert_eq!(a[n as usize] == a[n as usize - 2], marks.contains(&n), "n = {n}");
        }
    }

    #[test]
    fn occurrence_counts() {
        let c = count_c_table(21);
        assert_eq!(c, [1, 2, 1, 0, 2, 0, 1, 2, 0, 2, 0, 1, 2, 0, 2, 1, 0, 2, 0, 1, 2]);
        assert_eq!((count_c(0), count_c(1), count_c(3)), (1, 2, 0));
    }

    #[test]
    fn no_triples_and_adjacent_doubles() {
        let n = 10_000;
        let a = a105774_table(3 * n + 4);
        let mut first = vec![usize::MAX; n];
        for (m, &v) in a.iter().enumerate() {
            if (v as usize) < n {
                if first[v as usize] == usize::MAX {
                    first[v as usize] = m;
                } else {
                    assert_eq!(first[v as usize] + 1, m, "value {v}");
                }
            }
        }
        assert!(count_c_table(n).iter().all(|&c| c <= 2));
    }

    #[test]
    fn position_tables() {
        assert_eq!(positions(0, 19), [3, 5, 8, 10, 13, 16, 18, 21, 24, 26, 29, 31, 34, 37, 39, 42, 45, 47, 50]);
        assert_eq!(positions(1, 19), [0, 2, 6, 11, 15, 19, 23, 28, 32, 36, 40, 44, 49, 53, 57, 61, 66, 70, 74]);
        assert_eq!(positions(2, 19), [1, 4, 7, 9, 12, 14, 17, 20, 22, 25, 27, 30, 33, 35, 38, 41, 43, 46, 48]);
    }

    #[test]
    fn sorted_distinct_runs() {
        assert_eq!(sorted_a(6), [0, 1, 1, 2, 4, 4]);
        assert_eq!(
            distinct_transform(20),
            [0, 1, 2, 4, 7, 6, 12, 11, 9, 20, 19, 17, 14, 15, 33, 32, 30, 27, 28, 22]
        );
        assert_eq!(run_lengths(9), [1, 2, 1, 2, 2, 1, 2, 1, 2]);
        let c = count_c_table(10_000);
        for (n, d) in diff_d(10_000).into_iter().enumerate() {
            assert_eq!(d, 2 - c[n] as u64);
        }
    }

    #[test]
    fn w_prefix() {
        assert_eq!(w_table(21), [0, 1, 3, 4, 4, 6, 6, 6, 9, 9, 9, 9, 9, 14, 14, 14, 14, 14, 14, 14, 14]);
        assert_eq!((w(0), w(2), w(13)), (0, 3, 14));
    }

    #[test]
    fn special_values() {
        assert_eq!(s(6), 6);
        for n in 4..=30 {
            assert_eq!(s(n), s(n - 1) + s(n - 3) + s(n - 4), "s at {n}");
        }
        // t(1) = a(1) = 1 is off the closed form, so the recurrence
        // starts at n = 6
        assert_eq!((t(5), t(4) + t(2) + t(1)), (11, 10));
        for n in 6..=30 {
            assert_eq!(t(n), t(n - 1) + t(n - 3) + t(n - 4), "t at {n}");
        }
        assert!(rational_equals(&s_closed_form(6), 6));
        for n in 2..=30 {
            assert!(rational_equals(&s_closed_form(n), s(n)), "s closed form at {n}");
            assert!(rational_equals(&t_closed_form(n), t(n)), "t closed form at {n}");
        }
    }

    #[test]
    fn compositions() {
        assert_eq!(comp_x(1), 0);
        for n in 1..10_000u64 {
            let x = comp_x(n);
            assert!(x == 0 || x == 1);
            assert_eq!(x as u64, ones_parity(n - 1));
        }
        for n in 0..10_000u64 {
            assert!((-1..=1).contains(&comp_d(n)));
        }
    }

    #[test]
    fn suffix_minima_scan() {
        let sm = suffix_minima(2000);
        let a = a105774_table(20_000);
        for n in 1..=2000usize {
            let brute = a[n + 1..].iter().all(|&v| v > a[n]);
            assert_eq!(sm[n], brute, "n = {n}");
        }
    }

    #[test]
    fn named_tables() {
        for (name, _) in NAMES {
            let t = table(name, 12).unwrap_or_else(|| panic!("{name}"));
            assert_eq!(t.len(), 12, "{name}");
        }
        assert!(table("nope", 3).is_none());
        assert_eq!(table("a007067", 3).unwrap(), [0, 2, 3]);
    }
}
