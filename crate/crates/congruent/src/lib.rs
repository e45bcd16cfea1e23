//! Constructive verification that a square-free positive integer `n` is a
//! congruent number, by computing a Heegner point on `y^2 = x^3 - n^2 x`.
//!
//! The pipeline: pick a suitable negative fundamental discriminant for the
//! curve's conductor `N = 32 n^2`, enumerate one quadratic form per ideal
//! class, evaluate the modular parametrization `Phi(tau) = sum (a_m / m) q^m`
//! at the CM points, reduce the sum modulo the period lattice
//! `(pi / sqrt(n)) G Z[i]`, map through the Weierstrass function back to the
//! curve, reconstruct an exact rational point, and extract a rational right
//! triangle of area `n`. Every `Congruent` verdict is backed by exact
//! rational arithmetic; the floating-point work only proposes candidates.
//!
//! The crate is organized around the stages of that pipeline:
//!
//! - [`arith`]: modular arithmetic, high-precision real/complex scalars,
//!   rational reconstruction.
//! - [`curve`]: exact group law on `y^2 = x^3 - n^2 x`, conductor and
//!   reduction data, triangle extraction.
//! - [`lseries`]: L-series coefficients `a_m` and their persistent cache.
//! - [`lattice`]: period lattice via the AGM, Weierstrass `p` / `p'`.
//! - [`heegner`]: discriminants, form classes, `Phi` evaluation and the
//!   end-to-end [`heegner::verify`] entry point.
//! - [`cli`]: command-line front end used by the `congruent` binary.

pub mod arith;
pub mod cli;
pub mod curve;
pub mod heegner;
pub mod lattice;
pub mod lseries;

pub use curve::{CongruentCurve, RationalPoint, Triangle};
pub use heegner::{verify, Certificate, Verdict, VerifyConfig};
pub use lseries::CoefficientTable;
