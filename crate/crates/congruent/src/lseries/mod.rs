//! L-series coefficients `a_m` of `E(n): y^2 = x^3 - n^2 x`.
//!
//! Coefficients vanish at bad primes (the family has additive reduction)
//! and at every `m ≡ 3 mod 4`; at good `p ≡ 1 mod 4`, counting points is
//! cross-checked against a CM fast path through Cornacchia's two-squares
//! decomposition. Values extend to prime powers by the Hecke recurrence and
//! to all `m` by multiplicativity.

pub mod cache;

use crate::arith::modular::{self, is_prime, mul_mod};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LseriesError {
    #[error("p = {0} divides 2n: bad reduction is not countable this way")]
    BadReduction(u64),
    #[error("{0} is not prime")]
    NotAPrime(u64),
}

/// Character-sum counting stays authoritative up to this bound; above it
/// the two-squares CM path takes over (it is cross-checked against
/// counting in the test suite).
const CM_THRESHOLD: u64 = 10_000;

/// `#E(F_p)` including the point at infinity, by a full `O(p)` scan:
/// `p + 1 + sum_x chi(x^3 - n^2 x)` with `chi` the quadratic character.
pub fn count_points_mod_p(n: u64, p: u64) -> Result<u64, LseriesError> {
    if !is_prime(p) {
        return Err(LseriesError::NotAPrime(p));
    }
    if (2 * (n % p)) % p == 0 || n % p == 0 {
        return Err(LseriesError::BadReduction(p));
    }
    if p == 2 {
        return Err(LseriesError::BadReduction(p));
    }
    // Quadratic-residue bitmap, then one pass over x.
    let mut qr = vec![false; p as usize];
    for x in 0..=(p / 2) {
        qr[mul_mod(x, x, p) as usize] = true;
    }
    let n2 = mul_mod(n % p, n % p, p);
    let mut sum: i64 = 0;
    for x in 0..p {
        let v = (mul_mod(mul_mod(x, x, p), x, p) + p - mul_mod(n2, x, p)) % p;
        if v != 0 {
            sum += if qr[v as usize] { 1 } else { -1 };
        }
    }
    Ok((p as i64 + 1 + sum) as u64)
}

/// `a_p` by direct counting (good odd `p` only).
pub fn ap_counted(n: u64, p: u64) -> Result<i64, LseriesError> {
    let count = count_points_mod_p(n, p)?;
    Ok(p as i64 + 1 - count as i64)
}

/// `a_p` for the CM curve via Cornacchia: write `p = a^2 + b^2` with `a`
/// odd, `b` even, normalize `a + bi ≡ 1 mod (1+i)^3` (i.e. `a ≡ 1 mod 4`
/// when `4 | b`, else `a ≡ 3 mod 4`); then `a_p(x^3 - x) = 2a` and the
/// quadratic twist contributes the Legendre symbol `(n/p)`.
pub fn ap_cm(n: u64, p: u64) -> Result<i64, LseriesError> {
    if p % 4 != 1 {
        return Err(LseriesError::NotAPrime(p));
    }
    let (a, b) = modular::cornacchia_two_squares(p).map_err(|_| LseriesError::NotAPrime(p))?;
    let mut a = a as i64;
    let primary_residue = if b % 4 == 0 { 1 } else { 3 };
    if a % 4 != primary_residue {
        a = -a;
    }
    let chi = modular::legendre_symbol((n % p) as i64, p).expect("p is an odd prime");
    Ok(2 * a * chi as i64)
}

/// `a_p` for any prime: 0 at bad primes (additive reduction), 0 at good
/// `p ≡ 3 mod 4`, and the point count (or the CM fast path above the
/// threshold) at good `p ≡ 1 mod 4`.
pub fn ap(n: u64, p: u64) -> i64 {
    debug_assert!(is_prime(p));
    if p == 2 || n % p == 0 {
        return 0;
    }
    if p % 4 == 3 {
        return 0;
    }
    if p <= CM_THRESHOLD {
        ap_counted(n, p).expect("good reduction")
    } else {
        ap_cm(n, p).expect("p ≡ 1 mod 4")
    }
}

/// `a_{p^r}`: the Hecke recurrence `a_p a_{p^k} = a_{p^{k+1}} + p a_{p^{k-1}}`
/// at good primes, `(a_p)^r` at bad ones.
pub fn a_prime_power(ap: i64, p: u64, r: u32, bad: bool) -> i64 {
    assert!(r >= 1);
    if bad {
        return ap.pow(r);
    }
    let (mut prev, mut cur) = (1i64, ap); // a_{p^0}, a_{p^1}
    for _ in 1..r {
        let next = ap * cur - p as i64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Immutable table of `a_m` for `1 ≤ m ≤ limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTable {
    n: u64,
    limit: u32,
    entries: Vec<i64>,
}

impl CoefficientTable {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn limit(&self) -> u32 {
        self.limit
    }

    pub fn get(&self, m: u32) -> i64 {
        assert!(m >= 1 && m <= self.limit, "m = {m} out of table range");
        self.entries[m as usize]
    }

    /// `(m, a_m)` over the nonzero entries, ascending `m`.
    pub fn nonzero(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &a)| a != 0)
            .map(|(m, &a)| (m as u32, a))
    }

    pub fn from_parts(n: u64, limit: u32, entries: Vec<i64>) -> Self {
        assert_eq!(entries.len(), limit as usize + 1);
        Self { n, limit, entries }
    }
}

/// Primes up to `limit` by a plain sieve.
pub fn sieve_primes(limit: u32) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let size = limit as usize + 1;
    let mut composite = vec![false; size];
    let mut out = Vec::new();
    for i in 2..size {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < size {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Assemble `a_m` for all `m ≤ limit` multiplicatively from prime powers.
/// The per-prime work runs in parallel; the merge is order-independent, so
/// the table is deterministic regardless of thread schedule.
pub fn coefficients(n: u64, limit: u32) -> CoefficientTable {
    let size = limit as usize + 1;
    let mut entries = vec![0i64; size];
    if limit >= 1 {
        entries[1] = 1;
    }
    let primes = sieve_primes(limit);
    let prime_aps: Vec<(u64, i64)> = primes
        .par_iter()
        .map(|&p| (p, ap(n, p)))
        .collect();
    // Fill prime powers, then smallest-prime-factor decomposition for the rest.
    let mut spf = vec![0u32; size];
    for &(p, app) in &prime_aps {
        let bad = p == 2 || n % p == 0;
        let mut pk = p;
        let mut r = 1u32;
        while pk <= limit as u64 {
            entries[pk as usize] = a_prime_power(app, p, r, bad);
            pk *= p;
            r += 1;
        }
        let mut m = p as usize;
        while m < size {
            if spf[m] == 0 {
                spf[m] = p as u32;
            }
            m += p as usize;
        }
    }
    for m in 2..size {
        let p = spf[m] as usize;
        let mut rest = m / p;
        let mut pk = p;
        while rest % p == 0 {
            rest /= p;
            pk *= p;
        }
        if rest > 1 {
            entries[m] = entries[pk] * entries[rest];
        }
    }
    CoefficientTable {
        n,
        limit,
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Prop 5.2 expansion for n = 5 with two corrections established by
    /// counting, the CM formula and twist consistency: the m = 53 entry is
    /// -14 (not +14) and m = 89 carries +10.
    pub(crate) fn golden_n5() -> Vec<(u32, i64)> {
        vec![
            (1, 1),
            (9, -3),
            (13, -6),
            (17, -2),
            (29, -10),
            (37, 2),
            (41, 10),
            (49, -7),
            (53, -14),
            (61, -10),
            (73, 6),
            (81, 9),
            (89, 10),
            (97, -18),
        ]
    }

    pub(crate) fn golden_n13() -> Vec<(u32, i64)> {
        vec![
            (1, 1),
            (5, 2),
            (9, -3),
            (17, 2),
            (25, -1),
            (29, -10),
            (37, 2),
            (41, -10),
            (45, -6),
            (49, -7),
            (53, 14),
            (61, -10),
            (73, 6),
            (81, 9),
            (85, 4),
            (89, -10),
            (97, -18),
        ]
    }

    #[test]
    fn point_counts_match_lemma() {
        assert_eq!(count_points_mod_p(5, 3).unwrap(), 4);
        assert_eq!(count_points_mod_p(5, 7).unwrap(), 8);
        assert_eq!(count_points_mod_p(5, 13).unwrap(), 20);
        assert!(count_points_mod_p(5, 2).is_err());
        assert!(count_points_mod_p(5, 5).is_err());
        assert!(count_points_mod_p(5, 9).is_err());
    }

    #[test]
    fn ap_examples_from_both_curves() {
        assert_eq!(ap(13, 5), 2);
        assert_eq!(ap(5, 17), -2);
        assert_eq!(ap(13, 17), 2);
        assert_eq!(ap(5, 2), 0);
        assert_eq!(ap(5, 5), 0);
        for p in [3u64, 7, 11, 19, 23, 43, 1999] {
            assert_eq!(ap(5, p), 0, "p = {p} ≡ 3 mod 4");
        }
    }

    #[test]
    fn cm_path_agrees_with_counting() {
        for p in sieve_primes(2000) {
            if p % 4 == 1 {
                for n in [1u64, 5, 13, 6, 7] {
                    if n % p != 0 {
                        assert_eq!(ap_cm(n, p).unwrap(), ap_counted(n, p).unwrap(), "n={n} p={p}");
                    }
                }
            }
        }
    }

    #[test]
    fn prime_power_recurrence() {
        assert_eq!(a_prime_power(0, 3, 2, false), -3);
        assert_eq!(a_prime_power(0, 7, 2, false), -7);
        assert_eq!(a_prime_power(0, 3, 4, false), 9);
        assert_eq!(a_prime_power(2, 5, 2, false), -1);
        assert_eq!(a_prime_power(0, 3, 3, false), 0);
        // closed form for a_p = 0: 0 at odd r, (-p)^(r/2) at even r
        for p in [3u64, 7, 11] {
            for r in 1..=8u32 {
                let want = if r % 2 == 1 { 0 } else { (-(p as i64)).pow(r / 2) };
                assert_eq!(a_prime_power(0, p, r, false), want);
            }
        }
        // bad primes: (a_p)^r
        assert_eq!(a_prime_power(0, 2, 5, true), 0);
    }

    #[test]
    fn tables_match_golden_expansions() {
        let t5 = coefficients(5, 100);
        let got: Vec<(u32, i64)> = t5.nonzero().collect();
        assert_eq!(got, golden_n5());
        let t13 = coefficients(13, 100);
        let got: Vec<(u32, i64)> = t13.nonzero().collect();
        assert_eq!(got, golden_n13());
    }

    #[test]
    fn multiplicative_assembly_spot_checks() {
        let t = coefficients(13, 100);
        assert_eq!(t.get(45), -6); // a_9 * a_5
        assert_eq!(t.get(85), 4); // a_17 * a_5
        assert_eq!(t.get(1), 1);
    }

    #[test]
    fn vanishing_and_hasse_up_to_2000() {
        for n in [5u64, 13] {
            let t = coefficients(n, 2000);
            for m in 1..=2000u32 {
                if m % 4 == 3 {
                    assert_eq!(t.get(m), 0, "n={n} m={m}");
                }
            }
            for p in sieve_primes(2000) {
                if n % p != 0 && p != 2 {
                    let a = t.get(p as u32);
                    assert!((a * a) as u64 <= 4 * p, "Hasse fails at p={p}");
                }
            }
        }
    }

    #[test]
    fn twist_consistency_small_primes() {
        // a_p(n) = (n/p) a_p(1) against direct counts for good p ≤ 1000.
        for p in sieve_primes(1000) {
            if p == 2 {
                continue;
            }
            for n in [5u64, 13, 21] {
                if n % p == 0 {
                    continue;
                }
                let chi = modular::legendre_symbol(n as i64, p).unwrap() as i64;
                let lhs = ap_counted(n, p).unwrap();
                let rhs = chi * ap_counted(1, p).unwrap();
                assert_eq!(lhs, rhs, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn quadratic_extension_oracle_validates_recurrence() {
        // Count E(F_{p^2}) by brute force and check
        // #E(F_{p^2}) = p^2 + 1 - (a_p^2 - 2p), i.e. the r = 2 Hecke step.
        for (n, p) in [(5u64, 3u64), (5, 7), (5, 13), (13, 3), (13, 5), (13, 11)] {
            if n % p == 0 {
                continue;
            }
            // F_{p^2} = F_p[t]/(t^2 - s) with s a non-residue.
            let mut s = 2;
            while modular::legendre_symbol(s as i64, p).unwrap() != -1 {
                s += 1;
            }
            let add = |a: (u64, u64), b: (u64, u64)| ((a.0 + b.0) % p, (a.1 + b.1) % p);
            let mul = |a: (u64, u64), b: (u64, u64)| {
                (
                    (a.0 * b.0 % p + a.1 * b.1 % p * s) % p,
                    (a.0 * b.1 % p + a.1 * b.0 % p) % p,
                )
            };
            let n2 = (n % p) * (n % p) % p;
            let mut count = 1u64; // infinity
            for x0 in 0..p {
                for x1 in 0..p {
                    let x = (x0, x1);
                    let rhs = {
                        let x3 = mul(mul(x, x), x);
                        let nx = mul((n2, 0), x);
                        add(x3, ((p - nx.0) % p, (p - nx.1) % p))
                    };
                    for y0 in 0..p {
                        for y1 in 0..p {
                            if mul((y0, y1), (y0, y1)) == rhs {
                                count += 1;
                            }
                        }
                    }
                }
            }
            let a = ap(n, p);
            let expect = (p * p) as i64 + 1 - (a * a - 2 * p as i64);
            assert_eq!(count as i64, expect, "n={n} p={p}");
        }
    }
}
