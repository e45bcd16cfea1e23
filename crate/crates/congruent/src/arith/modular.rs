//! Modular arithmetic over `u64` moduli: primality, Legendre symbols,
//! square roots modulo prime powers, CRT, and Cornacchia's two-squares
//! decomposition.

use super::ArithError;

/// `a * b mod m` without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `b^e mod m` by square-and-multiply.
pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for `u64` (the 12-base set covers all 64-bit
/// integers).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division; adequate for the conductor-sized
/// inputs this crate deals with.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |p: u64, e: u32| {
        if e > 0 {
            out.push((p, e));
        }
    };
    let mut e = 0;
    while n % 2 == 0 {
        n /= 2;
        e += 1;
    }
    push(2, e);
    let mut p = 3u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        push(p, e);
        p += 2;
    }
    if n > 1 {
        push(n, 1);
    }
    out
}

/// True iff `n` has no repeated prime factor.
pub fn is_square_free(n: u64) -> bool {
    n > 0 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Legendre symbol `(a/p)` for an odd prime `p`, via Euler's criterion.
///
/// Rejects moduli that are not odd primes; callers must supply primes.
pub fn legendre_symbol(a: i64, p: u64) -> Result<i32, ArithError> {
    if p == 2 || !is_prime(p) {
        return Err(ArithError::NotAnOddPrime(p));
    }
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return Ok(0);
    }
    let t = pow_mod(a, (p - 1) / 2, p);
    Ok(if t == 1 { 1 } else { -1 })
}

/// Tonelli-Shanks square root modulo an odd prime. Returns `None` when `a`
/// is a non-residue.
fn sqrt_mod_odd_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    // p ≡ 1 mod 4: full Tonelli-Shanks.
    let mut q = p - 1;
    let mut s = 0u32;
    while q & 1 == 0 {
        q >>= 1;
        s += 1;
    }
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let mut b = c;
        for _ in 0..(m - i - 1) {
            b = mul_mod(b, b, p);
        }
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Modular inverse by extended Euclid; `None` when `gcd(a, m) != 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Least nonnegative `x` with `x^2 ≡ a (mod p^k)`, or `None` when no root
/// exists. Handles `p = 2` by stepwise lifting and odd `p` by
/// Tonelli-Shanks followed by Hensel lifting. `NoSolution` is a value here,
/// not an error.
///
/// Modulo `2^k` (k ≥ 3) a solvable unit case has four roots; this returns
/// the least and callers enumerate the rest when they need them.
pub fn sqrt_mod_prime_power(a: i64, p: u64, k: u32) -> Result<Option<u64>, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotAPrime(p));
    }
    if k == 0 {
        return Err(ArithError::ZeroExponent);
    }
    let modulus = (p as u128)
        .checked_pow(k)
        .filter(|&m| m <= u64::MAX as u128)
        .ok_or(ArithError::ModulusOverflow)? as u64;
    let a = (a as i128).rem_euclid(modulus as i128) as u64;
    if a == 0 {
        return Ok(Some(0));
    }
    // Strip the largest even power of p; odd valuation has no root.
    let mut v = 0u32;
    let mut unit = a;
    while unit % p == 0 {
        unit /= p;
        v += 1;
    }
    if v % 2 == 1 {
        return Ok(None);
    }
    let k_unit = k - v;
    let root_unit = if p == 2 {
        sqrt_unit_mod_pow2(unit, k_unit)
    } else {
        sqrt_unit_mod_odd_pow(unit, p, k_unit)
    };
    let Some(root_unit) = root_unit else {
        return Ok(None);
    };
    // x = p^(v/2) * y solves x^2 ≡ a mod p^k whenever y^2 ≡ unit mod p^(k-v).
    let shift = p.pow(v / 2);
    let x = (root_unit as u128 * shift as u128 % modulus as u128) as u64;
    let x = canonical_root(x, modulus);
    debug_assert_eq!(mul_mod(x, x, modulus), a % modulus);
    Ok(Some(x))
}

fn canonical_root(x: u64, modulus: u64) -> u64 {
    x.min((modulus - x) % modulus)
}

/// Root of an odd unit modulo `2^k`.
fn sqrt_unit_mod_pow2(a: u64, k: u32) -> Option<u64> {
    let m = 1u64 << k;
    let a = a & (m - 1);
    match k {
        1 => return Some(1),
        2 => return if a % 4 == 1 { Some(1) } else { None },
        _ => {}
    }
    if a % 8 != 1 {
        return None;
    }
    // Lift from mod 8 upward: if x^2 ≡ a mod 2^j, one of x, x + 2^(j-1)
    // works mod 2^(j+1).
    let mut x = 1u64;
    for j in 3..k {
        let mj1 = 1u64 << (j + 1);
        if (x.wrapping_mul(x)) & (mj1 - 1) != a & (mj1 - 1) {
            x += 1 << (j - 1);
        }
    }
    // Four roots for k ≥ 3: ±x and ±x + 2^(k-1); return the least.
    let half = m >> 1;
    let candidates = [x, m - x, (x + half) & (m - 1), m - ((x + half) & (m - 1))];
    candidates.into_iter().min()
}

/// Root of a unit modulo `p^k`, odd `p`: Tonelli-Shanks then Hensel.
fn sqrt_unit_mod_odd_pow(a: u64, p: u64, k: u32) -> Option<u64> {
    let mut x = sqrt_mod_odd_prime(a % p, p)?;
    let mut pj = p;
    for _ in 1..k {
        let pj1 = pj * p;
        // x' = x - (x^2 - a) / (2x) mod p^(j+1)
        let ax = a % pj1;
        let x2 = mul_mod(x, x, pj1);
        let diff = (x2 + pj1 - ax) % pj1;
        let inv2x = inv_mod(mul_mod(2, x, pj1), pj1)?;
        x = (x + pj1 - mul_mod(diff, inv2x, pj1)) % pj1;
        pj = pj1;
    }
    Some(x)
}

/// Combine residues `x ≡ r_i (mod m_i)` with pairwise coprime moduli.
/// Returns `(residue, product_modulus)`.
pub fn crt_combine(residues: &[(u64, u64)]) -> Result<(u64, u64), ArithError> {
    let mut r = 0u64;
    let mut m = 1u64;
    for &(ri, mi) in residues {
        if mi == 0 {
            return Err(ArithError::ZeroModulus);
        }
        if gcd(m, mi) != 1 {
            return Err(ArithError::NonCoprimeModuli(m, mi));
        }
        let prod = (m as u128)
            .checked_mul(mi as u128)
            .filter(|&v| v <= u64::MAX as u128)
            .ok_or(ArithError::ModulusOverflow)? as u64;
        // x = r + m * t with t ≡ (ri - r) / m (mod mi)
        let inv = inv_mod(m % mi, mi).ok_or(ArithError::NonCoprimeModuli(m, mi))?;
        let delta = ((ri % mi) + mi - (r % mi)) % mi;
        let t = mul_mod(delta, inv, mi);
        r += m * t;
        m = prod;
        r %= m;
    }
    Ok((r, m))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Decompose a prime `p ≡ 1 (mod 4)` as `a^2 + b^2` with `a` odd and `b`
/// even, via Cornacchia's descent on sqrt(-1) mod p.
pub fn cornacchia_two_squares(p: u64) -> Result<(u64, u64), ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotAPrime(p));
    }
    if p % 4 != 1 {
        return Err(ArithError::NotOneModFour(p));
    }
    let x0 = sqrt_mod_odd_prime(p - 1, p).expect("-1 is a QR mod p ≡ 1 mod 4");
    let x0 = x0.min(p - x0);
    let bound = isqrt(p);
    let (mut a, mut b) = (p, x0);
    while b > bound {
        (a, b) = (b, a % b);
    }
    let r = b;
    let s = isqrt(p - r * r);
    debug_assert_eq!(r * r + s * s, p);
    if r % 2 == 1 {
        Ok((r, s))
    } else {
        Ok((s, r))
    }
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).map_or(true, |v| v > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |v| v <= n) {
        x += 1;
    }
    x
}
