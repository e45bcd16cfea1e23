//! Heegner-point verification pipeline: discriminant selection, class
//! enumeration, modular-parametrization evaluation, and the end-to-end
//! [`verify`] entry point producing exact certificates.

mod forms;

pub use forms::{
    choose_discriminant, class_number, discriminant_candidates, heegner_representatives,
    is_fundamental, least_root, reduce_form, DiscriminantData, HeegnerForm,
};

use crate::arith::{self, ArithError, Complex, Precision, Rational};
use crate::curve::{CongruentCurve, CurveError, RationalPoint, Triangle};
use crate::lattice::{LatticeError, PeriodLattice};
use crate::lseries::{self, cache, CoefficientTable};
use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use rug::Float;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HeegnerError {
    #[error("{0} is not a negative discriminant")]
    BadDiscriminant(i64),
    #[error("no valid Heegner discriminant with |D| <= {0}")]
    NoDiscriminant(u32),
    #[error("class enumeration bound exceeded for D={0}, r={1} (wrong root?)")]
    EnumerationBound(i64, u64),
    #[error("quadratic form violates the Heegner invariants")]
    InvalidForm,
    #[error("conductor too large for the discriminant search")]
    ConductorTooLarge,
    #[error("coefficient table too small: need a_m up to {required}, have {have}")]
    TableTooSmall { required: u32, have: u32 },
    #[error("tau must lie in the upper half plane")]
    NotUpperHalfPlane,
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Sign of the functional equation for `E(n)`: `-1` when
/// `n mod 8 ∈ {5, 6, 7}` (the regime where the Heegner construction can
/// produce a non-torsion point), `+1` otherwise.
pub fn epsilon_sign(n: u64) -> i32 {
    match n % 8 {
        5 | 6 | 7 => -1,
        _ => 1,
    }
}

/// Terms needed to evaluate `Phi` at a point with the given `Im tau` so the
/// truncation tail stays below `10^-digits`.
///
/// Tail bound: `|a_m / m| ≤ d(m)/sqrt(m) ≤ 2`, so
/// `|sum_{m>M}| ≤ 2 |q|^{M+1} / (1 - |q|)` with `|q| = e^{-2 pi Im tau}`.
/// (The divisor bound is crude but safe: `d(m)/sqrt(m)` peaks at `sqrt 3`
/// at m = 12 and drops below 1 past m ≈ 1300.)
pub fn phi_truncation_terms(im_tau: &Float, digits: u32) -> u32 {
    let im = im_tau.to_f64();
    assert!(im > 0.0, "tau must be in the upper half plane");
    let two_pi_im = 2.0 * std::f64::consts::PI * im;
    let q_abs = (-two_pi_im).exp();
    let m = (digits as f64 * std::f64::consts::LN_10 + (2.0 / (1.0 - q_abs)).ln()) / two_pi_im;
    (m.ceil() as u32).max(16)
}

/// `Phi(tau) = sum_{m=1}^{M} (a_m / m) e^{2 pi i m tau}`, truncated per
/// [`phi_truncation_terms`]. The error names the required table size when
/// the coefficient table is too small.
pub fn phi_eval(
    tau: &Complex,
    coeffs: &CoefficientTable,
    prec: Precision,
) -> Result<Complex, HeegnerError> {
    if !(tau.im.is_sign_positive() && !tau.im.is_zero()) {
        return Err(HeegnerError::NotUpperHalfPlane);
    }
    let required = phi_truncation_terms(&tau.im, prec.digits());
    if coeffs.limit() < required {
        return Err(HeegnerError::TableTooSmall {
            required,
            have: coeffs.limit(),
        });
    }
    let bits = prec.bits();
    let two_pi = Float::with_val(bits, &prec.pi() * 2u32);
    let q = tau.scale(&two_pi).mul_i().exp();
    let mut sum = Complex::zero(bits);
    let mut qm = Complex::new(prec.real_from_u64(1), prec.zero());
    for m in 1..=required {
        qm = qm.mul(&q);
        let am = coeffs.get(m);
        if am != 0 {
            let scalar = Float::with_val(bits, am) / Float::with_val(bits, m);
            sum = sum.add(&qm.scale(&scalar));
        }
    }
    Ok(sum)
}

/// The Heegner sum `U = sum_i Phi(tau_i)` with its reduction mod the
/// lattice and the residual distance of `Im(U mod L)` from the nearest of
/// `{0, omega1/2, omega1}`.
#[derive(Debug, Clone)]
pub struct HeegnerSum {
    pub raw: Complex,
    pub reduced: Complex,
    pub imag_residual: Float,
    pub terms: u32,
}

/// Evaluate `Phi` over the class system (concurrently; the final sum is
/// accumulated in form order, so the result is schedule-independent).
pub fn heegner_sum(
    forms: &[HeegnerForm],
    coeffs: &CoefficientTable,
    lattice: &PeriodLattice,
    prec: Precision,
) -> Result<HeegnerSum, HeegnerError> {
    let phis: Vec<Complex> = forms
        .par_iter()
        .map(|f| phi_eval(&f.tau(prec), coeffs, prec))
        .collect::<Result<_, _>>()?;
    let mut raw = Complex::zero(prec.bits());
    for p in &phis {
        raw = raw.add(p);
    }
    let reduced = lattice.reduce(&raw);
    let imag_residual = imag_residual(&reduced.im, lattice.omega1());
    let terms = forms
        .iter()
        .map(|f| phi_truncation_terms(&f.tau(prec).im, prec.digits()))
        .max()
        .unwrap_or(0);
    Ok(HeegnerSum {
        raw,
        reduced,
        imag_residual,
        terms,
    })
}

fn imag_residual(im: &Float, omega1: &Float) -> Float {
    let bits = im.prec();
    let half = Float::with_val(bits, omega1 / 2u32);
    let d0 = im.clone().abs();
    let dh = Float::with_val(bits, im - &half).abs();
    let d1 = Float::with_val(bits, im - omega1).abs();
    d0.min(&dh).min(&d1)
}

/// Pipeline verdict. `Congruent` is unforgeable: it is only emitted after
/// the exact on-curve and triangle identities hold in rational arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Congruent,
    Inapplicable,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Congruent => "congruent",
            Verdict::Inapplicable => "inapplicable",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Starting working precision, in decimal digits; escalated to 2P and
    /// 4P when rational reconstruction fails.
    pub digits: u32,
    /// Override the automatic Phi truncation bound.
    pub max_terms: Option<u32>,
    /// Force a specific discriminant instead of the ascending-|D| search.
    pub forced_disc: Option<i64>,
    /// Rescale the period lattice (Manin-constant escape hatch; scale 1 is
    /// validated by both worked examples).
    pub lattice_scale: f64,
    /// Double the reconstructed point before extracting the triangle even
    /// when the three-squares condition already holds.
    pub double_first: bool,
    /// Search bound on |D|.
    pub disc_bound: u32,
    /// Optional coefficient cache location.
    pub cache_path: Option<PathBuf>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            digits: 60,
            max_terms: None,
            forced_disc: None,
            lattice_scale: 1.0,
            double_first: false,
            disc_bound: 10_000,
            cache_path: None,
        }
    }
}

/// Per-run diagnostics; everything needed to audit a verdict.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub precision_digits: u32,
    pub terms_summed: u32,
    pub imag_residual: f64,
    pub curve_residual: f64,
    pub y_cross_check: Option<bool>,
    pub attempts: Vec<String>,
    pub reason: Option<String>,
}

/// Verification certificate. For a `Congruent` verdict the point satisfies
/// `y^2 = x^3 - n^2 x` exactly and the triangle identities hold exactly;
/// [`Certificate::check_exact`] re-derives both from scratch.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub n: u64,
    pub verdict: Verdict,
    pub epsilon: i32,
    pub conductor: u64,
    pub discriminant: Option<i64>,
    pub root: Option<u64>,
    pub class_number: Option<u32>,
    /// The class system actually used, as (A, B, C) triples.
    pub forms: Vec<(String, String, String)>,
    /// CM points of those forms (low-precision view for reporting).
    pub taus: Vec<(f64, f64)>,
    /// `U mod Lambda` at working precision, decimal.
    pub u_re: Option<String>,
    pub u_im: Option<String>,
    /// Exact reconstructed point.
    pub point: Option<(Rational, Rational)>,
    /// Point the triangle formulas were applied to (the reconstructed
    /// point or its double).
    pub triangle_point: Option<(Rational, Rational)>,
    pub triangle: Option<Triangle>,
    pub diagnostics: Diagnostics,
}

impl Certificate {
    fn base(n: u64, curve: &CongruentCurve) -> Self {
        Self {
            n,
            verdict: Verdict::Inconclusive,
            epsilon: epsilon_sign(n),
            conductor: curve.conductor(),
            discriminant: None,
            root: None,
            class_number: None,
            forms: Vec::new(),
            taus: Vec::new(),
            u_re: None,
            u_im: None,
            point: None,
            triangle_point: None,
            triangle: None,
            diagnostics: Diagnostics::default(),
        }
    }

    /// Re-verify the exact identities behind a `Congruent` verdict using
    /// nothing but the certificate's own data.
    pub fn check_exact(&self) -> Result<(), String> {
        if self.verdict != Verdict::Congruent {
            return Err("verdict is not congruent".into());
        }
        let curve = CongruentCurve::new(self.n).map_err(|e| e.to_string())?;
        for pair in [&self.point, &self.triangle_point] {
            let (x, y) = pair.as_ref().ok_or("missing point")?;
            if y * y != curve.rhs(x) {
                return Err("point is not on the curve".into());
            }
            if y.is_zero() {
                return Err("point is torsion".into());
            }
        }
        let t = self.triangle.as_ref().ok_or("missing triangle")?;
        if !t.is_valid_for(self.n) {
            return Err("triangle identities fail".into());
        }
        Ok(())
    }
}

/// Outcome of one discriminant attempt inside [`verify`].
enum Attempt {
    Done(Box<Certificate>),
    Torsion,
    Failed(String),
}

/// End-to-end verification pipeline.
///
/// Discriminants are tried in ascending `|D|`; a torsion Heegner sum moves
/// on to the next valid discriminant, and rational-reconstruction failures
/// escalate the working precision to `2P` and `4P` first. Every failure
/// path lands on `Inconclusive` with a reason — never on a false
/// `Congruent`.
pub fn verify(n: u64, config: &VerifyConfig) -> Result<Certificate, CurveError> {
    let curve = CongruentCurve::new(n)?;
    let mut cert = Certificate::base(n, &curve);
    if cert.epsilon == 1 {
        cert.verdict = Verdict::Inapplicable;
        cert.diagnostics.reason = Some(format!(
            "n = {} has n mod 8 = {} (epsilon = +1); the one-sided Heegner test requires n mod 8 in {{5, 6, 7}}",
            n,
            n % 8
        ));
        return Ok(cert);
    }
    let candidates = match gather_candidates(&curve, n, config) {
        Ok(c) => c,
        Err(reason) => {
            cert.verdict = Verdict::Inconclusive;
            cert.diagnostics.reason = Some(reason);
            return Ok(cert);
        }
    };
    if candidates.is_empty() {
        cert.verdict = Verdict::Inconclusive;
        cert.diagnostics.reason = Some(format!(
            "no valid Heegner discriminant with |D| <= {}",
            config.disc_bound
        ));
        return Ok(cert);
    }
    let mut table: Option<CoefficientTable> = None;
    for data in candidates {
        match attempt_discriminant(&curve, data, config, &mut table, &mut cert.diagnostics) {
            Attempt::Done(done) => return Ok(*done),
            Attempt::Torsion => {
                cert.diagnostics.attempts.push(format!(
                    "D={}: Heegner sum lies in the torsion image S_n; trying the next discriminant",
                    data.disc
                ));
            }
            Attempt::Failed(why) => {
                cert.diagnostics
                    .attempts
                    .push(format!("D={}: {}", data.disc, why));
            }
        }
    }
    cert.verdict = Verdict::Inconclusive;
    cert.diagnostics.reason = Some(format!(
        "exhausted discriminants up to |D| <= {} without a non-torsion reconstruction",
        config.disc_bound
    ));
    Ok(cert)
}

fn gather_candidates(
    curve: &CongruentCurve,
    n: u64,
    config: &VerifyConfig,
) -> Result<Vec<DiscriminantData>, String> {
    match config.forced_disc {
        Some(d) => {
            if !is_fundamental(d) || d.rem_euclid(2) == 0 {
                return Err(format!("forced discriminant {d} is not odd fundamental"));
            }
            if arith::modular::gcd(d.unsigned_abs(), 2 * n) != 1 {
                return Err(format!("forced discriminant {d} shares a factor with 2n"));
            }
            let four_n = 4 * curve.conductor();
            let root = least_root(four_n, d)
                .map_err(|e| e.to_string())?
                .ok_or_else(|| format!("x^2 = {d} mod {four_n} has no solution"))?;
            let class_number = class_number(d).map_err(|e| e.to_string())?;
            Ok(vec![DiscriminantData {
                disc: d,
                class_number,
                root,
            }])
        }
        None => discriminant_candidates(curve.conductor(), n, config.disc_bound)
            .map_err(|e| e.to_string()),
    }
}

fn attempt_discriminant(
    curve: &CongruentCurve,
    data: DiscriminantData,
    config: &VerifyConfig,
    table: &mut Option<CoefficientTable>,
    diags: &mut Diagnostics,
) -> Attempt {
    let n = curve.n();
    let forms = match heegner_representatives(curve.conductor(), data.disc, data.root) {
        Ok(f) => f,
        Err(e) => return Attempt::Failed(e.to_string()),
    };
    let mut last_failure = String::new();
    for pmul in [1u32, 2, 4] {
        let prec = Precision::new(config.digits * pmul);
        let lattice = PeriodLattice::new(n, prec, config.lattice_scale);
        let needed = config.max_terms.unwrap_or_else(|| {
            forms
                .iter()
                .map(|f| phi_truncation_terms(&f.tau(prec).im, prec.digits()))
                .max()
                .expect("non-empty class system")
        });
        if let Err(why) = ensure_table(table, n, needed, config) {
            return Attempt::Failed(why);
        }
        let coeffs = table.as_ref().expect("table just ensured");
        let sum = match heegner_sum(&forms, coeffs, &lattice, prec) {
            Ok(s) => s,
            Err(e) => return Attempt::Failed(e.to_string()),
        };
        diags.precision_digits = prec.digits();
        diags.terms_summed = sum.terms;
        diags.imag_residual = sum.imag_residual.to_f64();
        let tol = lattice.default_tol();
        if lattice.in_torsion_image(&sum.reduced, &tol) {
            return Attempt::Torsion;
        }
        match reconstruct_point(curve, &lattice, &sum, prec, diags) {
            Ok(Some((point, y_cross))) => {
                let (x, y) = point;
                let rat_point = RationalPoint::affine(x.clone(), y.clone());
                let (triangle, used) =
                    match curve.triangle_from_point(&rat_point, config.double_first) {
                        Ok(v) => v,
                        Err(CurveError::TorsionInput) => return Attempt::Torsion,
                        Err(e) => return Attempt::Failed(e.to_string()),
                    };
                let mut cert = Certificate::base(n, curve);
                cert.verdict = Verdict::Congruent;
                cert.discriminant = Some(data.disc);
                cert.root = Some(data.root);
                cert.class_number = Some(data.class_number);
                cert.forms = forms
                    .iter()
                    .map(|f| (f.a.to_string(), f.b.to_string(), f.c.to_string()))
                    .collect();
                cert.taus = forms.iter().map(|f| f.tau(prec).to_f64_pair()).collect();
                cert.u_re = Some(format!("{:e}", sum.reduced.re));
                cert.u_im = Some(format!("{:e}", sum.reduced.im));
                cert.point = Some((x, y));
                let (ux, uy) = used.xy().expect("triangle point is affine");
                cert.triangle_point = Some((ux.clone(), uy.clone()));
                cert.triangle = Some(triangle);
                cert.diagnostics = diags.clone();
                cert.diagnostics.y_cross_check = Some(y_cross);
                debug_assert!(cert.check_exact().is_ok());
                return Attempt::Done(Box::new(cert));
            }
            Ok(None) => return Attempt::Torsion,
            Err(why) => {
                last_failure = format!("{why} (at P = {})", prec.digits());
                diags
                    .attempts
                    .push(format!("D={}: {}", data.disc, last_failure));
            }
        }
    }
    Attempt::Failed(format!(
        "precision escalation exhausted; last failure: {last_failure}"
    ))
}

fn ensure_table(
    table: &mut Option<CoefficientTable>,
    n: u64,
    needed: u32,
    config: &VerifyConfig,
) -> Result<(), String> {
    if table.as_ref().map_or(false, |t| t.n() == n && t.limit() >= needed) {
        return Ok(());
    }
    let fresh = match &config.cache_path {
        Some(path) => cache::load_or_extend(path, n, needed).map_err(|e| e.to_string())?,
        None => lseries::coefficients(n, needed),
    };
    *table = Some(fresh);
    Ok(())
}

type ExactPoint = (Rational, Rational);

/// Snap `U mod Lambda` onto the real-or-half-period line, evaluate the
/// Weierstrass pair there, and reconstruct the exact x-coordinate (y comes
/// from the curve equation; the float y only picks the sign and serves as
/// a cross-check). `Ok(None)` means the point collapsed to torsion.
fn reconstruct_point(
    curve: &CongruentCurve,
    lattice: &PeriodLattice,
    sum: &HeegnerSum,
    prec: Precision,
    diags: &mut Diagnostics,
) -> Result<Option<(ExactPoint, bool)>, String> {
    let bits = prec.bits();
    let omega1 = lattice.omega1();
    let tol = lattice.default_tol();
    let im = &sum.reduced.im;
    let half = Float::with_val(bits, omega1 / 2u32);
    let snapped_im = if imag_dist(im, &prec.zero()) <= tol || imag_dist(im, omega1) <= tol {
        prec.zero()
    } else if imag_dist(im, &half) <= tol {
        half
    } else {
        return Err(format!(
            "imaginary part of U mod Lambda is off the real/half-period lines by {:.3e}",
            sum.imag_residual.to_f64()
        ));
    };
    let z = Complex::new(sum.reduced.re.clone(), snapped_im);
    let (xf, yf) = lattice.to_curve_point(&z).map_err(|e| e.to_string())?;
    // float-level curve residual, reported for diagnostics
    let n2 = (curve.n() * curve.n()) as i64;
    let resid = yf
        .mul(&yf)
        .sub(&xf.mul(&xf).mul(&xf).sub(&xf.scale_i64(n2)))
        .abs();
    diags.curve_residual = resid.to_f64();
    let den_bound = den_bound_for(prec);
    let Some(x) = arith::rational_reconstruct(&xf.re, &den_bound) else {
        return Err(format!(
            "rational reconstruction of x failed with denominator bound 10^{}",
            (prec.digits() / 2).saturating_sub(5).max(3)
        ));
    };
    let rhs = curve.rhs(&x);
    let Some(y_abs) = arith::is_rational_square(&rhs) else {
        return Err(format!(
            "reconstructed x = {} does not give a rational square on the curve",
            arith::format_rational(&x)
        ));
    };
    if y_abs.is_zero() {
        return Ok(None);
    }
    let y = if yf.re.is_sign_negative() { -y_abs } else { y_abs };
    // cross-check: reconstructing y directly must agree when it succeeds
    let y_cross = arith::rational_reconstruct(&yf.re, &den_bound)
        .map(|yr| yr == y)
        .unwrap_or(false);
    Ok(Some(((x, y), y_cross)))
}

fn imag_dist(a: &Float, b: &Float) -> Float {
    Float::with_val(a.prec(), a - b).abs()
}

fn den_bound_for(prec: Precision) -> BigUint {
    let exp = (prec.digits() / 2).saturating_sub(5).max(3);
    BigUint::from(10u32).pow(exp)
}
