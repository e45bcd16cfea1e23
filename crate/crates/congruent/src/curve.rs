//! Exact arithmetic on `E(n): y^2 = x^3 - n^2 x` over the rationals.

use crate::arith::{self, is_rational_square, Rational};
use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CurveError {
    #[error("n = {0} is not square-free")]
    NotSquareFree(u64),
    #[error("n = {0} overflows the conductor computation")]
    ConductorOverflow(u64),
    #[error("point is not on the curve")]
    OffCurve,
    #[error("torsion point carries no triangle")]
    TorsionInput,
}

/// Reduction behavior of `E(n)` at a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    Good,
    /// The only bad reduction in this family; the singular point is a cusp.
    Additive,
}

/// Conductor `N = 2^5 n^2` of `E(n)`; rejects non-square-free `n`.
pub fn conductor(n: u64) -> Result<u64, CurveError> {
    if !arith::is_square_free(n) {
        return Err(CurveError::NotSquareFree(n));
    }
    n.checked_mul(n)
        .and_then(|n2| n2.checked_mul(32))
        .ok_or(CurveError::ConductorOverflow(n))
}

/// The curve `y^2 = x^3 - n^2 x` together with its conductor and
/// discriminant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruentCurve {
    n: u64,
    conductor: u64,
    discriminant: BigInt,
}

/// A rational point on `E(n)`, affine or at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalPoint {
    Infinity,
    Affine { x: Rational, y: Rational },
}

impl RationalPoint {
    pub fn affine(x: Rational, y: Rational) -> Self {
        Self::Affine { x, y }
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        Self::Affine {
            x: Rational::from(BigInt::from(x)),
            y: Rational::from(BigInt::from(y)),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Self::Infinity)
    }

    pub fn neg(&self) -> Self {
        match self {
            Self::Infinity => Self::Infinity,
            Self::Affine { x, y } => Self::Affine {
                x: x.clone(),
                y: -y.clone(),
            },
        }
    }

    pub fn xy(&self) -> Option<(&Rational, &Rational)> {
        match self {
            Self::Infinity => None,
            Self::Affine { x, y } => Some((x, y)),
        }
    }
}

impl std::fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Infinity => write!(f, "infinity"),
            Self::Affine { x, y } => write!(
                f,
                "({}, {})",
                arith::format_rational(x),
                arith::format_rational(y)
            ),
        }
    }
}

/// A rational right triangle: legs `a`, `b`, hypotenuse `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangle {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl Triangle {
    /// Exact checks `a^2 + b^2 = c^2` and `a b / 2 = n`.
    pub fn is_valid_for(&self, n: u64) -> bool {
        let pyth = &self.a * &self.a + &self.b * &self.b == &self.c * &self.c;
        let area = &self.a * &self.b == Rational::from(BigInt::from(n)) * BigInt::from(2);
        pyth && area
    }
}

impl std::fmt::Display for Triangle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {} {}",
            arith::format_rational(&self.a),
            arith::format_rational(&self.b),
            arith::format_rational(&self.c)
        )
    }
}

impl CongruentCurve {
    pub fn new(n: u64) -> Result<Self, CurveError> {
        let conductor = conductor(n)?;
        let n6 = BigInt::from(n).pow(6);
        Ok(Self {
            n,
            conductor,
            // Discriminant of x^3 - n^2 x; only the prime support (2 and
            // p | n) is contractually meaningful.
            discriminant: BigInt::from(4) * n6,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    /// Additive exactly at primes dividing `2n`; multiplicative reduction
    /// never occurs in this family (the singular point is always a cusp).
    pub fn reduction_type(&self, p: u64) -> Reduction {
        if (2 * self.n) % p == 0 {
            Reduction::Additive
        } else {
            Reduction::Good
        }
    }

    fn n_rational(&self) -> Rational {
        Rational::from(BigInt::from(self.n))
    }

    /// `x^3 - n^2 x` evaluated exactly.
    pub fn rhs(&self, x: &Rational) -> Rational {
        let n2 = &self.n_rational() * &self.n_rational();
        x * x * x - n2 * x
    }

    pub fn contains(&self, p: &RationalPoint) -> bool {
        match p {
            RationalPoint::Infinity => true,
            RationalPoint::Affine { x, y } => y * y == self.rhs(x),
        }
    }

    /// Chord-tangent addition; `Infinity` is the identity.
    pub fn add(&self, p: &RationalPoint, q: &RationalPoint) -> Result<RationalPoint, CurveError> {
        if !self.contains(p) || !self.contains(q) {
            return Err(CurveError::OffCurve);
        }
        Ok(self.add_unchecked(p, q))
    }

    fn add_unchecked(&self, p: &RationalPoint, q: &RationalPoint) -> RationalPoint {
        let (x1, y1) = match p.xy() {
            None => return q.clone(),
            Some(v) => v,
        };
        let (x2, y2) = match q.xy() {
            None => return p.clone(),
            Some(v) => v,
        };
        let lambda = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return RationalPoint::Infinity;
            }
            // Tangent: (3x^2 - n^2) / (2y)
            let n2 = &self.n_rational() * &self.n_rational();
            (Rational::from(BigInt::from(3)) * x1 * x1 - n2)
                / (Rational::from(BigInt::from(2)) * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda - x1 - x2;
        let y3 = lambda * (x1 - &x3) - y1;
        RationalPoint::Affine { x: x3, y: y3 }
    }

    /// Exact duplication.
    pub fn double(&self, p: &RationalPoint) -> Result<RationalPoint, CurveError> {
        self.add(p, p)
    }

    /// The full torsion subgroup `Z/2 + Z/2`: infinity and the three
    /// 2-torsion points.
    pub fn torsion_points(&self) -> Vec<RationalPoint> {
        let n = self.n as i64;
        vec![
            RationalPoint::Infinity,
            RationalPoint::from_i64(0, 0),
            RationalPoint::from_i64(n, 0),
            RationalPoint::from_i64(-n, 0),
        ]
    }

    pub fn is_torsion(&self, p: &RationalPoint) -> bool {
        match p {
            RationalPoint::Infinity => true,
            RationalPoint::Affine { y, .. } => y.is_zero(),
        }
    }

    /// Triangle of area `n` from a non-torsion point.
    ///
    /// When `x`, `x+n`, `x-n` are all rational squares the triangle comes
    /// straight from the square roots; otherwise the point is doubled once,
    /// which forces the three-squares condition. With `double_first` the
    /// check is skipped and the point is doubled unconditionally. Returns
    /// the triangle together with the point the formulas were applied to.
    pub fn triangle_from_point(
        &self,
        p: &RationalPoint,
        double_first: bool,
    ) -> Result<(Triangle, RationalPoint), CurveError> {
        if !self.contains(p) {
            return Err(CurveError::OffCurve);
        }
        if self.is_torsion(p) {
            return Err(CurveError::TorsionInput);
        }
        if !double_first {
            if let Some(t) = self.try_triangle(p) {
                return Ok((t, p.clone()));
            }
        }
        let doubled = self.add_unchecked(p, p);
        match self.try_triangle(&doubled) {
            Some(t) => Ok((t, doubled)),
            // Doubling an existing rational point always satisfies the
            // three-squares criterion; reaching this means the input was
            // not actually on the curve.
            None => Err(CurveError::OffCurve),
        }
    }

    fn try_triangle(&self, p: &RationalPoint) -> Option<Triangle> {
        let (x, _) = p.xy()?;
        let n = self.n_rational();
        let sx = is_rational_square(x)?;
        let sp = is_rational_square(&(x + &n))?;
        let sm = is_rational_square(&(x - &n))?;
        let a = &sp + &sm;
        let b = sp - sm;
        let c = Rational::from(BigInt::from(2)) * sx;
        let (a, b) = if a >= b { (a, b) } else { (b, a) };
        let t = Triangle { a, b, c };
        debug_assert!(t.is_valid_for(self.n));
        Some(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> Rational {
        arith::parse_rational(s).unwrap()
    }

    #[test]
    fn conductor_values() {
        assert_eq!(conductor(5).unwrap(), 800);
        assert_eq!(conductor(13).unwrap(), 5408);
        assert_eq!(conductor(1).unwrap(), 32);
        assert_eq!(conductor(12), Err(CurveError::NotSquareFree(12)));
    }

    #[test]
    fn reduction_types() {
        let e5 = CongruentCurve::new(5).unwrap();
        assert_eq!(e5.reduction_type(2), Reduction::Additive);
        assert_eq!(e5.reduction_type(3), Reduction::Good);
        assert_eq!(e5.reduction_type(5), Reduction::Additive);
        let e13 = CongruentCurve::new(13).unwrap();
        assert_eq!(e13.reduction_type(13), Reduction::Additive);
        assert_eq!(e13.reduction_type(7), Reduction::Good);
    }

    #[test]
    fn discriminant_support_is_2n() {
        let e = CongruentCurve::new(15).unwrap();
        let d = e.discriminant();
        for p in [2u64, 3, 5] {
            assert!((d % BigInt::from(p)).is_zero());
        }
        assert!(!(d % BigInt::from(7)).is_zero());
    }

    #[test]
    fn reduction_matches_singular_point_search() {
        // Oracle: E mod p is singular iff some on-curve (x, y) kills both
        // partial derivatives.
        for n in [5u64, 13, 6] {
            let e = CongruentCurve::new(n).unwrap();
            for p in (2u64..100).filter(|&p| arith::is_prime(p)) {
                let n2 = (n % p) * (n % p) % p;
                let mut singular = false;
                for x in 0..p {
                    let rhs = (x * x % p * x % p + p - n2 * x % p) % p;
                    for y in 0..p {
                        if y * y % p == rhs && (2 * y) % p == 0 {
                            let dx = (3 * x % p * x % p + p - n2) % p;
                            if dx == 0 {
                                singular = true;
                            }
                        }
                    }
                }
                let expected = matches!(e.reduction_type(p), Reduction::Additive);
                assert_eq!(singular, expected, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn identity_and_two_torsion_chords() {
        let e = CongruentCurve::new(5).unwrap();
        let g = RationalPoint::from_i64(-4, 6);
        assert_eq!(e.add(&g, &RationalPoint::Infinity).unwrap(), g);
        let t0 = RationalPoint::from_i64(0, 0);
        let tp = RationalPoint::from_i64(5, 0);
        let tm = RationalPoint::from_i64(-5, 0);
        assert_eq!(e.add(&t0, &tp).unwrap(), tm);
        assert_eq!(e.double(&t0).unwrap(), RationalPoint::Infinity);
        assert_eq!(
            e.double(&RationalPoint::Infinity).unwrap(),
            RationalPoint::Infinity
        );
    }

    #[test]
    fn doubling_the_generator_on_n5() {
        let e = CongruentCurve::new(5).unwrap();
        let g = RationalPoint::from_i64(-4, 6);
        let d = e.double(&g).unwrap();
        assert_eq!(
            d,
            RationalPoint::affine(rat("1681/144"), rat("-62279/1728"))
        );
    }

    #[test]
    fn doubling_matches_displayed_pair() {
        let e = CongruentCurve::new(5).unwrap();
        let p = RationalPoint::affine(rat("1681/144"), rat("62279/1728"));
        // The x-input equals the unreduced 1050625/90000.
        assert_eq!(rat("1050625/90000"), rat("1681/144"));
        let d = e.double(&p).unwrap();
        assert_eq!(
            d,
            RationalPoint::affine(
                rat("11183412793921/2234116132416"),
                rat("-1791076534232245919/3339324446657665536"),
            )
        );
    }

    #[test]
    fn rejects_off_curve() {
        let e = CongruentCurve::new(5).unwrap();
        let bogus = RationalPoint::from_i64(1, 1);
        assert_eq!(
            e.add(&bogus, &RationalPoint::Infinity),
            Err(CurveError::OffCurve)
        );
    }

    #[test]
    fn torsion_points_double_to_infinity() {
        for n in [5u64, 13] {
            let e = CongruentCurve::new(n).unwrap();
            let ts = e.torsion_points();
            assert_eq!(ts.len(), 4);
            assert!(ts.contains(&RationalPoint::from_i64(n as i64, 0)));
            for t in &ts {
                assert!(e.contains(t));
                assert_eq!(e.double(t).unwrap(), RationalPoint::Infinity);
            }
        }
    }

    #[test]
    fn group_law_axioms_on_point_pool() {
        let e = CongruentCurve::new(5).unwrap();
        let g = RationalPoint::from_i64(-4, 6);
        let mut pool = e.torsion_points();
        let mut acc = g.clone();
        for _ in 0..3 {
            pool.push(acc.clone());
            pool.push(acc.neg());
            let shifted = e.add(&acc, &RationalPoint::from_i64(0, 0)).unwrap();
            pool.push(shifted);
            acc = e.add(&acc, &g).unwrap();
        }
        // commutativity + identity + inverse
        for p in &pool {
            assert_eq!(e.add(p, &RationalPoint::Infinity).unwrap(), *p);
            assert_eq!(e.add(p, &p.neg()).unwrap(), RationalPoint::Infinity);
            for q in &pool {
                assert_eq!(e.add(p, q).unwrap(), e.add(q, p).unwrap());
            }
        }
        // associativity over all triples (13^3 exact checks)
        for p in &pool {
            for q in &pool {
                let pq = e.add(p, q).unwrap();
                for r in &pool {
                    let qr = e.add(q, r).unwrap();
                    assert_eq!(e.add(&pq, r).unwrap(), e.add(p, &qr).unwrap());
                }
            }
        }
    }

    #[test]
    fn triangle_small_for_n5() {
        let e = CongruentCurve::new(5).unwrap();
        let p = RationalPoint::affine(rat("1681/144"), rat("62279/1728"));
        let (t, used) = e.triangle_from_point(&p, false).unwrap();
        assert_eq!(t.a, rat("20/3"));
        assert_eq!(t.b, rat("3/2"));
        assert_eq!(t.c, rat("41/6"));
        assert!(t.is_valid_for(5));
        assert_eq!(used, p);
    }

    #[test]
    fn triangle_doubled_for_n5() {
        let e = CongruentCurve::new(5).unwrap();
        let p = RationalPoint::affine(rat("1681/144"), rat("62279/1728"));
        let (t, used) = e.triangle_from_point(&p, true).unwrap();
        assert_eq!(t.a, rat("4920/1519"));
        assert_eq!(t.b, rat("1519/492"));
        assert_eq!(t.c, rat("3344161/747348"));
        assert!(t.is_valid_for(5));
        assert_eq!(used.xy().unwrap().0, &rat("11183412793921/2234116132416"));
    }

    #[test]
    fn triangle_for_n13_golden_point() {
        let e = CongruentCurve::new(13).unwrap();
        let p = RationalPoint::affine(
            rat("11432100241/375584400"),
            rat("1105240264347961/7278825672000"),
        );
        assert!(e.contains(&p));
        let (t, used) = e.triangle_from_point(&p, false).unwrap();
        assert_eq!(t.a, rat("323/30"));
        assert_eq!(t.b, rat("780/323"));
        assert_eq!(t.c, rat("106921/9690"));
        assert!(t.is_valid_for(13));
        assert_eq!(&used, &p);
    }

    #[test]
    fn triangle_from_egg_point_doubles() {
        // x = -4 < 0 cannot be a square, so the generator (-4, 6) on E(5)
        // must go through the doubling path.
        let e = CongruentCurve::new(5).unwrap();
        let g = RationalPoint::from_i64(-4, 6);
        let (t, used) = e.triangle_from_point(&g, false).unwrap();
        assert_eq!(used.xy().unwrap().0, &rat("1681/144"));
        assert_eq!(t.a, rat("20/3"));
    }

    #[test]
    fn triangle_rejects_torsion() {
        let e = CongruentCurve::new(5).unwrap();
        assert_eq!(
            e.triangle_from_point(&RationalPoint::from_i64(5, 0), false),
            Err(CurveError::TorsionInput)
        );
        assert_eq!(
            e.triangle_from_point(&RationalPoint::Infinity, false),
            Err(CurveError::TorsionInput)
        );
    }
}
