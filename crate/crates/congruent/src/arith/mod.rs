//! Exact integer/rational arithmetic and number-theoretic primitives.

pub mod hp;
pub mod modular;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use rug::Float;
use thiserror::Error;

pub use hp::{Complex, Precision};
pub use modular::{
    cornacchia_two_squares, crt_combine, factorize, is_prime, is_square_free, legendre_symbol,
    sqrt_mod_prime_power,
};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator (maintained by `num_rational`).
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not an odd prime")]
    NotAnOddPrime(u64),
    #[error("{0} is not prime")]
    NotAPrime(u64),
    #[error("{0} is not congruent to 1 mod 4")]
    NotOneModFour(u64),
    #[error("prime-power exponent must be positive")]
    ZeroExponent,
    #[error("modulus does not fit in 64 bits")]
    ModulusOverflow,
    #[error("zero modulus")]
    ZeroModulus,
    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(u64, u64),
}

/// Parse a rational from `p/q` or plain integer notation.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (num_s, den_s) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num_s.parse().ok()?;
    let den: BigInt = den_s.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Render as `p/q` (or `p` when the denominator is 1).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn float_to_bigint_floor(x: &Float) -> BigInt {
    let f = x.clone().floor();
    let i = f.to_integer().expect("finite float");
    i.to_string().parse().expect("decimal integer")
}

fn bigint_to_float(v: &BigInt, bits: u32) -> Float {
    let exact: rug::Integer = v.to_string().parse().expect("decimal integer");
    Float::with_val(bits, exact)
}

/// Render an exact rational as a high-precision float.
pub fn rational_to_float(r: &Rational, prec: Precision) -> Float {
    let bits = prec.bits();
    bigint_to_float(r.numer(), bits) / bigint_to_float(r.denom(), bits)
}

/// Recover an exact rational p/q, q ≤ `den_bound`, from a real
/// approximation via its continued-fraction convergents. Accepts the first
/// convergent with |x - p/q| < 1/(2 q den_bound); returns `None` when no
/// convergent within the bound qualifies (insufficient precision or a
/// non-rational input — raise precision and retry).
///
/// A match is the unique rational within that window, but nothing certifies
/// the input was rational; callers confirm the candidate by exact
/// arithmetic downstream.
pub fn rational_reconstruct(x: &Float, den_bound: &BigUint) -> Option<Rational> {
    if !x.is_finite() || den_bound.is_zero() {
        return None;
    }
    let bits = x.prec();
    let bound = BigInt::from(den_bound.clone());
    // Convergents p_k/q_k of the continued fraction of x.
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p_cur, mut q_cur);
    let mut t = x.clone();
    let a0 = float_to_bigint_floor(&t);
    p_cur = a0.clone();
    q_cur = BigInt::one();
    t -= bigint_to_float(&a0, bits);
    for _ in 0..(bits as usize) {
        if q_cur > bound {
            return None;
        }
        // |x - p/q| < 1 / (2 q den_bound) ?
        let approx = bigint_to_float(&p_cur, bits) / bigint_to_float(&q_cur, bits);
        let err = (x - approx).abs();
        let tol_den = bigint_to_float(&(2 * &q_cur * &bound), bits);
        if err * tol_den < 1 {
            return Some(Rational::new(p_cur, q_cur));
        }
        if t.is_zero() {
            return None;
        }
        t = t.recip();
        let a = float_to_bigint_floor(&t);
        t -= bigint_to_float(&a, bits);
        let p_next = &a * &p_cur + &p_prev;
        let q_next = &a * &q_cur + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
    }
    None
}

/// Exact square root of a nonnegative rational, when it exists.
pub fn is_rational_square(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(Rational::zero());
    }
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let sn = num.sqrt();
    if &sn * &sn != *num {
        return None;
    }
    let sd = den.sqrt();
    if &sd * &sd != *den {
        return None;
    }
    Some(Rational::new(BigInt::from(sn), BigInt::from(sd)))
}

/// Exact square root of a nonnegative big integer, when it exists.
pub fn exact_biguint_sqrt(n: &BigUint) -> Option<BigUint> {
    let s = n.sqrt();
    if &s * &s == *n {
        Some(s)
    } else {
        None
    }
}

/// gcd helper on `BigInt` magnitudes.
pub fn bigint_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}
