//! Command-line front end: argument parsing, orchestration, JSON
//! certificate output and coefficient-cache persistence.
//!
//! Exit statuses are a stable contract: 0 = congruent, 2 = inapplicable,
//! 3 = inconclusive, 1 = usage or internal error. Diagnostics go to
//! standard error; machine-readable output goes to standard output.

use crate::arith::{self, Rational};
use crate::curve::Triangle;
use crate::heegner::{self, Certificate, Verdict, VerifyConfig};
use crate::lseries::{self, cache};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

pub const EXIT_CONGRUENT: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INAPPLICABLE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Constructively verify congruent numbers via Heegner points.
#[derive(Debug, Parser)]
#[command(name = "congruent", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify that n is a congruent number and emit a certificate.
    Verify(VerifyArgs),
    /// Compute L-series coefficients and write/extend a cache file.
    Coeffs(CoeffsArgs),
    /// Verify n and print only the certificate triangle.
    Triangle(VerifyArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Square-free positive integer to test.
    n: u64,
    /// Working precision in decimal digits (escalated on failure).
    #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u32).range(30..))]
    digits: u32,
    /// Override the automatic Phi truncation bound.
    #[arg(long, value_parser = clap::value_parser!(u32).range(16..))]
    terms: Option<u32>,
    /// Force a specific Heegner discriminant (e.g. -55).
    #[arg(long, allow_hyphen_values = true)]
    disc: Option<i64>,
    /// Double the reconstructed point before extracting the triangle.
    #[arg(long)]
    double_first: bool,
    /// Rescale the period lattice by this factor.
    #[arg(long, default_value_t = 1.0)]
    lattice_scale: f64,
    /// Coefficient cache file to read and extend.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Emit the certificate as JSON on standard output.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct CoeffsArgs {
    /// Curve parameter n.
    n: u64,
    /// Compute a_m for all m up to this bound.
    #[arg(long)]
    limit: u32,
    /// Cache file to create or extend; prints to stdout when omitted.
    #[arg(long)]
    cache: Option<PathBuf>,
}

impl VerifyArgs {
    fn config(&self) -> VerifyConfig {
        VerifyConfig {
            digits: self.digits,
            max_terms: self.terms,
            forced_disc: self.disc,
            lattice_scale: self.lattice_scale,
            double_first: self.double_first,
            cache_path: self.cache.clone(),
            ..VerifyConfig::default()
        }
    }
}

/// Parse arguments and run; returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/version text
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match cli.command {
        Command::Verify(args) => cmd_verify(&args, false),
        Command::Triangle(args) => cmd_verify(&args, true),
        Command::Coeffs(args) => cmd_coeffs(&args),
    }
}

fn cmd_verify(args: &VerifyArgs, triangle_only: bool) -> i32 {
    let cert = match heegner::verify(args.n, &args.config()) {
        Ok(cert) => cert,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if triangle_only {
        report_triangle(&cert)
    } else if args.json {
        match serde_json::to_string_pretty(&CertificateJson::from(&cert)) {
            Ok(json) => {
                println!("{json}");
                verdict_status(cert.verdict)
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        }
    } else {
        report_text(&cert)
    }
}

fn report_triangle(cert: &Certificate) -> i32 {
    match (cert.verdict, &cert.triangle) {
        (Verdict::Congruent, Some(t)) => {
            println!("{t}");
            EXIT_CONGRUENT
        }
        _ => {
            report_failure_to_stderr(cert);
            verdict_status(cert.verdict)
        }
    }
}

fn report_text(cert: &Certificate) -> i32 {
    for line in &cert.diagnostics.attempts {
        eprintln!("note: {line}");
    }
    match cert.verdict {
        Verdict::Congruent => {
            let (x, y) = cert.point.as_ref().expect("congruent cert has a point");
            println!("n = {}: congruent", cert.n);
            println!(
                "discriminant D = {}, h = {}, r = {}",
                cert.discriminant.unwrap_or_default(),
                cert.class_number.unwrap_or_default(),
                cert.root.unwrap_or_default()
            );
            println!(
                "point ({}, {})",
                arith::format_rational(x),
                arith::format_rational(y)
            );
            if let Some(t) = &cert.triangle {
                println!("triangle {t}");
            }
            EXIT_CONGRUENT
        }
        _ => {
            report_failure_to_stderr(cert);
            println!("n = {}: {}", cert.n, cert.verdict);
            verdict_status(cert.verdict)
        }
    }
}

fn report_failure_to_stderr(cert: &Certificate) {
    if let Some(reason) = &cert.diagnostics.reason {
        eprintln!("{}: {}", cert.verdict, reason);
    }
}

fn verdict_status(v: Verdict) -> i32 {
    match v {
        Verdict::Congruent => EXIT_CONGRUENT,
        Verdict::Inapplicable => EXIT_INAPPLICABLE,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn cmd_coeffs(args: &CoeffsArgs) -> i32 {
    if args.limit < 1 {
        eprintln!("error: --limit must be at least 1");
        return EXIT_USAGE;
    }
    match &args.cache {
        Some(path) => match cache::load_or_extend(path, args.n, args.limit) {
            Ok(_) => EXIT_CONGRUENT,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
        None => {
            let table = lseries::coefficients(args.n, args.limit);
            print!("{}", cache::render(&table));
            EXIT_CONGRUENT
        }
    }
}

/// JSON shape of a [`Certificate`]: exact rationals rendered as `p/q`
/// strings so reports can be re-verified by exact arithmetic alone.
#[derive(Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    pub n: u64,
    pub verdict: String,
    pub epsilon: i32,
    pub conductor: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_number: Option<u32>,
    pub forms: Vec<[String; 3]>,
    pub taus: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_re: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_im: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triangle_x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triangle_y: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    pub precision_digits: u32,
    pub terms_summed: u32,
    pub imag_residual: f64,
    pub curve_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_cross_check: Option<bool>,
    pub attempts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl From<&Certificate> for CertificateJson {
    fn from(cert: &Certificate) -> Self {
        let rat = arith::format_rational;
        Self {
            n: cert.n,
            verdict: cert.verdict.to_string(),
            epsilon: cert.epsilon,
            conductor: cert.conductor,
            discriminant: cert.discriminant,
            root: cert.root,
            class_number: cert.class_number,
            forms: cert
                .forms
                .iter()
                .map(|(a, b, c)| [a.clone(), b.clone(), c.clone()])
                .collect(),
            taus: cert.taus.iter().map(|&(re, im)| [re, im]).collect(),
            u_re: cert.u_re.clone(),
            u_im: cert.u_im.clone(),
            x: cert.point.as_ref().map(|(x, _)| rat(x)),
            y: cert.point.as_ref().map(|(_, y)| rat(y)),
            triangle_x: cert.triangle_point.as_ref().map(|(x, _)| rat(x)),
            triangle_y: cert.triangle_point.as_ref().map(|(_, y)| rat(y)),
            a: cert.triangle.as_ref().map(|t| rat(&t.a)),
            b: cert.triangle.as_ref().map(|t| rat(&t.b)),
            c: cert.triangle.as_ref().map(|t| rat(&t.c)),
            precision_digits: cert.diagnostics.precision_digits,
            terms_summed: cert.diagnostics.terms_summed,
            imag_residual: cert.diagnostics.imag_residual,
            curve_residual: cert.diagnostics.curve_residual,
            y_cross_check: cert.diagnostics.y_cross_check,
            attempts: cert.diagnostics.attempts.clone(),
            reason: cert.diagnostics.reason.clone(),
        }
    }
}

impl CertificateJson {
    /// Re-check the exact identities (on-curve, Pythagorean, area) from the
    /// report's strings alone. Non-congruent reports only validate shape.
    pub fn check_exact(&self) -> Result<(), String> {
        if self.verdict != "congruent" {
            return Ok(());
        }
        let parse = |field: &Option<String>, name: &str| -> Result<Rational, String> {
            field
                .as_deref()
                .and_then(arith::parse_rational)
                .ok_or_else(|| format!("missing or unparsable field {name}"))
        };
        let curve = crate::curve::CongruentCurve::new(self.n).map_err(|e| e.to_string())?;
        for (xf, yf, tag) in [
            (&self.x, &self.y, "point"),
            (&self.triangle_x, &self.triangle_y, "triangle point"),
        ] {
            let x = parse(xf, tag)?;
            let y = parse(yf, tag)?;
            if &y * &y != curve.rhs(&x) {
                return Err(format!("{tag} fails the curve equation"));
            }
        }
        let t = Triangle {
            a: parse(&self.a, "a")?,
            b: parse(&self.b, "b")?,
            c: parse(&self.c, "c")?,
        };
        if !t.is_valid_for(self.n) {
            return Err("triangle identities fail".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_recheck() {
        let cert = heegner::verify(5, &VerifyConfig::default()).unwrap();
        let json = serde_json::to_string(&CertificateJson::from(&cert)).unwrap();
        let parsed: CertificateJson = serde_json::from_str(&json).unwrap();
        parsed.check_exact().unwrap();
        assert_eq!(parsed.x.as_deref(), Some("1681/144"));
        assert_eq!(parsed.verdict, "congruent");
    }

    #[test]
    fn json_rejects_tampered_certificate() {
        let cert = heegner::verify(5, &VerifyConfig::default()).unwrap();
        let mut report = CertificateJson::from(&cert);
        report.x = Some("1681/143".into());
        assert!(report.check_exact().is_err());
    }

    #[test]
    fn usage_error_for_non_square_free() {
        assert_eq!(run(["congruent", "verify", "12"]), EXIT_USAGE);
        assert_eq!(run(["congruent", "triangle", "18"]), EXIT_USAGE);
    }

    #[test]
    fn inapplicable_exit_status() {
        assert_eq!(run(["congruent", "verify", "1"]), EXIT_INAPPLICABLE);
        assert_eq!(run(["congruent", "triangle", "1"]), EXIT_INAPPLICABLE);
    }
}
