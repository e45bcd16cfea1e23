//! Binary quadratic forms, class numbers, Heegner discriminant selection
//! and class-system enumeration.

use super::HeegnerError;
use crate::arith::{self, Complex, Precision};
use rug::Float;

/// An integral quadratic form `(A, B, C)` of discriminant `D` with
/// `N | A`, `B ≡ r (mod 2N)`, `r^2 ≡ D (mod 4N)`. Its CM point is
/// `tau = (-B + sqrt(D)) / (2A)` in the upper half plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeegnerForm {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub disc: i64,
    pub root: u64,
}

impl HeegnerForm {
    /// Build and validate against the type invariants.
    pub fn new(a: i128, b: i128, c: i128, level: u64, disc: i64, root: u64) -> Result<Self, HeegnerError> {
        let f = Self { a, b, c, disc, root };
        f.validate(level)?;
        Ok(f)
    }

    pub fn validate(&self, level: u64) -> Result<(), HeegnerError> {
        let ok = self.a > 0
            && self.b * self.b - 4 * self.a * self.c == self.disc as i128
            && gcd3(self.a, self.b, self.c) == 1
            && self.a % level as i128 == 0
            && (self.b - self.root as i128).rem_euclid(2 * level as i128) == 0;
        if ok {
            Ok(())
        } else {
            Err(HeegnerError::InvalidForm)
        }
    }

    /// CM point `(-B + i sqrt(|D|)) / (2A)`.
    pub fn tau(&self, prec: Precision) -> Complex {
        let bits = prec.bits();
        let two_a = Float::with_val(bits, 2) * Float::with_val(bits, self.a);
        let re = Float::with_val(bits, -self.b) / &two_a;
        let im = Float::with_val(bits, (-self.disc) as u64).sqrt() / &two_a;
        Complex::new(re, im)
    }

    /// Reduced representative of the form's class.
    pub fn reduced(&self) -> (i128, i128, i128) {
        reduce_form(self.a, self.b, self.c)
    }
}

fn gcd2(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn gcd3(a: i128, b: i128, c: i128) -> i128 {
    gcd2(gcd2(a, b), c)
}

/// Gauss reduction of a positive-definite form: swap and translate until
/// `|B| ≤ A ≤ C`, with `B ≥ 0` when `|B| = A` or `A = C`.
pub fn reduce_form(mut a: i128, mut b: i128, mut c: i128) -> (i128, i128, i128) {
    debug_assert!(a > 0 && b * b - 4 * a * c < 0);
    let d = b * b - 4 * a * c;
    loop {
        if c < a {
            (a, b, c) = (c, -b, a);
            continue;
        }
        if b > a || b <= -a {
            // translate b into (-a, a]
            let two_a = 2 * a;
            let mut nb = b.rem_euclid(two_a);
            if nb > a {
                nb -= two_a;
            }
            b = nb;
            c = (b * b - d) / (4 * a);
            continue;
        }
        break;
    }
    if (b < 0 && a == c) || b == -a {
        b = -b;
    }
    (a, b, c)
}

/// Fundamental negative discriminant test: `D ≡ 1 mod 4` square-free, or
/// `D = 4m` with `m ≡ 2, 3 mod 4` square-free.
pub fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let m4 = d.rem_euclid(4);
    if m4 == 1 {
        return arith::is_square_free(d.unsigned_abs());
    }
    if m4 == 0 {
        let q = d / 4;
        let qm4 = q.rem_euclid(4);
        return (qm4 == 2 || qm4 == 3) && arith::is_square_free(q.unsigned_abs());
    }
    false
}

/// Class number `h(D)` for `D < 0`: the count of reduced primitive forms
/// `|B| ≤ A ≤ C`, `B^2 - 4AC = D`, with `B ≥ 0` on the boundary cases.
pub fn class_number(d: i64) -> Result<u32, HeegnerError> {
    if d >= 0 || d.rem_euclid(4) > 1 {
        return Err(HeegnerError::BadDiscriminant(d));
    }
    let mut count = 0u32;
    let mut b = d.rem_euclid(2);
    while b * b <= -d / 3 {
        let q = (b * b - d) / 4; // = a c
        let mut a = if b > 1 { b } else { 1 };
        while a * a <= q {
            if q % a == 0 {
                let c = q / a;
                if gcd3(a as i128, b as i128, c as i128) == 1 {
                    // (a, b, c) and (a, -b, c) are distinct classes except
                    // on the boundary b = 0, a = b, a = c.
                    if b == 0 || a == b || a == c {
                        count += 1;
                    } else {
                        count += 2;
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    Ok(count)
}

/// Discriminant data for the Heegner construction: a fundamental `D < 0`,
/// its class number, and the least positive root of `D mod 4N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscriminantData {
    pub disc: i64,
    pub class_number: u32,
    pub root: u64,
}

/// The least positive `r` with `r^2 ≡ d (mod 4N)`, if any: solved
/// prime-power-wise over the factorization of `4N` and CRT-combined over
/// every branch of roots.
pub fn least_root(conductor_4n: u64, d: i64) -> Result<Option<u64>, HeegnerError> {
    let factors = arith::factorize(conductor_4n);
    // Collect the full root set per prime power, then take the minimum over
    // all CRT combinations.
    let mut branches: Vec<Vec<(u64, u64)>> = Vec::new();
    for &(p, k) in &factors {
        let m = p.pow(k);
        let Some(r0) = arith::sqrt_mod_prime_power(d, p, k).map_err(HeegnerError::Arith)? else {
            return Ok(None);
        };
        let mut roots = vec![r0];
        let neg = (m - r0) % m;
        if !roots.contains(&neg) {
            roots.push(neg);
        }
        if p == 2 && k >= 3 {
            let half = m / 2;
            for extra in [(r0 + half) % m, (m - (r0 + half) % m) % m] {
                if !roots.contains(&extra) {
                    roots.push(extra);
                }
            }
        }
        branches.push(roots.into_iter().map(|r| (r, m)).collect());
    }
    let mut best: Option<u64> = None;
    let mut stack: Vec<(usize, Vec<(u64, u64)>)> = vec![(0, Vec::new())];
    while let Some((idx, acc)) = stack.pop() {
        if idx == branches.len() {
            let (r, m) = arith::crt_combine(&acc).map_err(HeegnerError::Arith)?;
            let r = if r == 0 { m } else { r };
            best = Some(best.map_or(r, |b| b.min(r)));
            continue;
        }
        for &choice in &branches[idx] {
            let mut next = acc.clone();
            next.push(choice);
            stack.push((idx + 1, next));
        }
    }
    Ok(best)
}

/// Valid Heegner discriminants for conductor `N` in ascending `|D|`:
/// odd fundamental `D < 0`, coprime to `2N`, with `r^2 ≡ D (mod 4N)`
/// solvable. `bound` caps `|D|`.
pub fn discriminant_candidates(
    conductor: u64,
    n: u64,
    bound: u32,
) -> Result<Vec<DiscriminantData>, HeegnerError> {
    let four_n = conductor
        .checked_mul(4)
        .ok_or(HeegnerError::ConductorTooLarge)?;
    let mut out = Vec::new();
    let mut d = -3i64;
    while -d <= bound as i64 {
        // odd fundamental discriminants are exactly the square-free D ≡ 1 mod 4
        if d.rem_euclid(4) == 1
            && is_fundamental(d)
            && arith::modular::gcd(d.unsigned_abs(), 2 * n) == 1
        {
            if let Some(root) = least_root(four_n, d)? {
                out.push(DiscriminantData {
                    disc: d,
                    class_number: class_number(d)?,
                    root,
                });
            }
        }
        d -= 2;
    }
    Ok(out)
}

/// The smallest valid discriminant (by `|D|`) for the conductor.
pub fn choose_discriminant(
    conductor: u64,
    n: u64,
    bound: u32,
) -> Result<DiscriminantData, HeegnerError> {
    discriminant_candidates(conductor, n, bound)?
        .into_iter()
        .next()
        .ok_or(HeegnerError::NoDiscriminant(bound))
}

/// One Heegner form per ideal class of discriminant `D`, all sharing the
/// root `r`: enumerate `A = N k` for `k = 1, 2, ...`, `B` over the residue
/// class `r mod 2N` below `2A`, keep integral primitive forms, first
/// representative found per reduced class, stop once all `h(D)` classes
/// are covered.
pub fn heegner_representatives(
    conductor: u64,
    d: i64,
    r: u64,
) -> Result<Vec<HeegnerForm>, HeegnerError> {
    let h = class_number(d)?;
    let n128 = conductor as i128;
    let two_n = 2 * n128;
    let r128 = (r as i128).rem_euclid(two_n);
    let mut found: Vec<(i128, i128, i128)> = Vec::new();
    let mut out = Vec::new();
    for k in 1..=ENUMERATION_K_BOUND {
        let a = n128 * k as i128;
        let four_a = 4 * a;
        let mut b = r128;
        while b <= 2 * a {
            let num = b * b - d as i128;
            if num % four_a == 0 {
                let c = num / four_a;
                if c > 0 && gcd3(a, b, c) == 1 {
                    let class = reduce_form(a, b, c);
                    if !found.contains(&class) {
                        found.push(class);
                        out.push(HeegnerForm {
                            a,
                            b,
                            c,
                            disc: d,
                            root: r,
                        });
                        if out.len() == h as usize {
                            return Ok(out);
                        }
                    }
                }
            }
            b += two_n;
        }
    }
    Err(HeegnerError::EnumerationBound(d, r))
}

const ENUMERATION_K_BOUND: u32 = 4096;
