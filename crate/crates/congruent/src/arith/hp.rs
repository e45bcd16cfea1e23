//! High-precision real and complex scalars.
//!
//! Reals are MPFR floats (`rug::Float`); a complex value is a plain pair of
//! reals. [`Precision`] carries the user-facing decimal digit count `P` and
//! converts it to a bit width with guard bits. MPFR's basic operations are
//! correctly rounded, so each arithmetic step contributes at most one ulp
//! (~10^-(P+9)); the multi-term accumulations in this crate keep totals well
//! inside the documented 10^(1-P) absolute error budget.

use rug::float::Constant;
use rug::ops::Pow;
use rug::ops::CompleteRound;
use rug::{Float, Integer};

/// Working precision, in decimal digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision {
    digits: u32,
}

impl Precision {
    const GUARD_DIGITS: u32 = 9;

    pub fn new(digits: u32) -> Self {
        Self {
            digits: digits.max(2),
        }
    }

    pub fn digits(self) -> u32 {
        self.digits
    }

    /// Mantissa bits: (P + guard) digits converted at log2(10), rounded up.
    pub fn bits(self) -> u32 {
        (((self.digits + Self::GUARD_DIGITS) as f64) * std::f64::consts::LOG2_10).ceil() as u32
    }

    pub fn real_from_u64(self, v: u64) -> Float {
        Float::with_val(self.bits(), v)
    }

    pub fn real_from_i64(self, v: i64) -> Float {
        Float::with_val(self.bits(), v)
    }

    pub fn real_from_f64(self, v: f64) -> Float {
        Float::with_val(self.bits(), v)
    }

    pub fn real_from_integer(self, v: &Integer) -> Float {
        Float::with_val(self.bits(), v)
    }

    /// Parse a decimal string at working precision.
    pub fn real_from_str(self, s: &str) -> Option<Float> {
        Float::parse(s).ok().map(|p| Float::with_val(self.bits(), p))
    }

    pub fn zero(self) -> Float {
        Float::with_val(self.bits(), 0)
    }

    pub fn pi(self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }

    /// 10^(-digits), the nominal absolute error target.
    pub fn epsilon(self) -> Float {
        Float::with_val(self.bits(), 10).pow(-(self.digits as i32))
    }

    pub fn complex(self, re: f64, im: f64) -> Complex {
        Complex::new(self.real_from_f64(re), self.real_from_f64(im))
    }
}

/// Complex number as a pair of high-precision reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::with_val(re.prec(), 0);
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, 0),
            im: Float::with_val(prec, 0),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: (-&self.im).complete(self.im.prec()),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            re: (-&self.re).complete(self.re.prec()),
            im: (-&self.im).complete(self.im.prec()),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            re: (&self.re + &rhs.re).complete(self.prec()),
            im: (&self.im + &rhs.im).complete(self.prec()),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            re: (&self.re - &rhs.re).complete(self.prec()),
            im: (&self.im - &rhs.im).complete(self.prec()),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &rhs.re) - Float::with_val(p, &self.im * &rhs.im);
        let im = Float::with_val(p, &self.re * &rhs.im) + Float::with_val(p, &self.im * &rhs.re);
        Self { re, im }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let p = self.prec();
        let d = rhs.norm_sqr();
        let re = Float::with_val(p, &self.re * &rhs.re) + Float::with_val(p, &self.im * &rhs.im);
        let im = Float::with_val(p, &self.im * &rhs.re) - Float::with_val(p, &self.re * &rhs.im);
        Self {
            re: re / &d,
            im: im / &d,
        }
    }

    pub fn scale(&self, s: &Float) -> Self {
        Self {
            re: (&self.re * s).complete(self.prec()),
            im: (&self.im * s).complete(self.prec()),
        }
    }

    pub fn scale_i64(&self, s: i64) -> Self {
        Self {
            re: (&self.re * s).complete(self.prec()),
            im: (&self.im * s).complete(self.prec()),
        }
    }

    /// Multiply by i.
    pub fn mul_i(&self) -> Self {
        Self {
            re: (-&self.im).complete(self.prec()),
            im: self.re.clone(),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    /// e^z = e^re (cos im + i sin im).
    pub fn exp(&self) -> Self {
        let p = self.prec();
        let r = self.im.clone();
        let (sin, cos) = r.sin_cos(Float::new(p));
        let m = self.re.clone().exp();
        Self {
            re: (&m * &cos).complete(p),
            im: (&m * &sin).complete(p),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl std::fmt::Display for Complex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im.is_sign_negative() {
            write!(f, "{} - {}i", self.re, (-&self.im).complete(self.im.prec()))
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Float, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() < tol
    }

    #[test]
    fn precision_bits_cover_digits() {
        let p = Precision::new(60);
        assert!(p.bits() >= 200);
        assert_eq!(p.digits(), 60);
    }

    #[test]
    fn complex_field_ops() {
        let p = Precision::new(40);
        let a = p.complex(3.0, -2.0);
        let b = p.complex(-1.5, 0.25);
        let prod = a.mul(&b);
        assert!(close(&prod.re, 3.0 * -1.5 - -2.0 * 0.25, 1e-12));
        assert!(close(&prod.im, 3.0 * 0.25 + -2.0 * -1.5, 1e-12));
        let q = prod.div(&b);
        assert!(close(&q.re, 3.0, 1e-12));
        assert!(close(&q.im, -2.0, 1e-12));
    }

    #[test]
    fn complex_exp_matches_euler() {
        let p = Precision::new(50);
        // e^(i pi) = -1
        let z = Complex::new(p.zero(), p.pi());
        let e = z.exp();
        assert!(close(&e.re, -1.0, 1e-40));
        assert!(close(&e.im, 0.0, 1e-40));
    }

    #[test]
    fn conjugation_and_abs() {
        let p = Precision::new(40);
        let z = p.complex(3.0, 4.0);
        assert!(close(&z.abs(), 5.0, 1e-12));
        let w = z.mul(&z.conj());
        assert!(close(&w.re, 25.0, 1e-12));
        assert!(close(&w.im, 0.0, 1e-12));
    }
}
