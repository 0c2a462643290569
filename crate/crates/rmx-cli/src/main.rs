//! `rmx` — evaluate Z_n-symmetric elliptic R-matrices, run the
//! verification suites, and sample the degeneration paths.
//!
//! Exit codes: `0` success, `1` at least one check failed, `2` domain /
//! pole / dimension errors (including bad arguments), `3` non-convergence.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rmx_cli::document::MatrixDocument;
use rmx_core::cnum::{format_f64_exact, parse_complex, C64};
use rmx_core::error::{Result, RmxError};
use rmx_core::matrix::max_norm;
use rmx_core::property_suite::{
    convergence_table, run_suite, ConvergenceKind, SuiteKind, TolOverrides,
};
use rmx_core::qproducts::ScalarParams;
use rmx_core::theta_kernel::TruncationControl;
use rmx_core::trig_limits::{r_dy, r_q, DegenerateParams, DEFAULT_QUAD_TOL};
use rmx_core::twist::twist_f;
use rmx_core::znrmatrix::{s_full, sbar_sum};

#[derive(Parser)]
#[command(
    name = "rmx",
    version = "0.1.0",
    about = "Z_n-symmetric elliptic R-matrix toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a matrix and write it as a JSON document (stdout or --output).
    Eval(EvalArgs),
    /// Run a verification suite; one PASS/FAIL line per check.
    Check(CheckArgs),
    /// Sample a degeneration path and emit the convergence table as CSV.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum EvalKind {
    /// Bare elliptic R-matrix from the Weyl-monomial sum.
    Sbar,
    /// Dressed (unitarized) elliptic R-matrix.
    SFull,
    /// Scaling-limit trigonometric R-matrix.
    RDy,
    /// Ordinary-limit trigonometric R-matrix.
    #[value(name = "r_q")]
    RQ,
    /// Twist matrix F12 relating the two limits.
    TwistF,
}

impl EvalKind {
    fn name(&self) -> &'static str {
        match self {
            EvalKind::Sbar => "sbar",
            EvalKind::SFull => "s_full",
            EvalKind::RDy => "r_dy",
            EvalKind::RQ => "r_q",
            EvalKind::TwistF => "twist_f",
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    /// Which matrix to build.
    #[arg(long, value_enum)]
    kind: EvalKind,
    /// Rank parameter (n >= 2).
    #[arg(long)]
    n: u32,
    /// Spectral argument z (sbar), e.g. `0.17+0.06i`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z: Option<C64>,
    /// Crossing parameter w (sbar, s_full).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    w: Option<C64>,
    /// Modulus tau with positive imaginary part (sbar, s_full).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    tau: Option<C64>,
    /// Spectral parameter v (s_full).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    v: Option<C64>,
    /// Additive spectral parameter beta (r_dy, r_q).
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Coupling xi (s_full, r_dy, r_q).
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<f64>,
    /// Planck-like scale hbar (r_dy, r_q; defaults to 1).
    #[arg(long, allow_hyphen_values = true)]
    hbar: Option<f64>,
    /// Skip the kappa scalar factor (r_dy, r_q).
    #[arg(long)]
    no_kappa: bool,
    /// Truncation tolerance (falls back to RMX_DEFAULT_TOL, then 1e-12).
    #[arg(long)]
    tol: Option<f64>,
    /// Seed recorded in the document provenance.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the document here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Suite name: ybe, unitarity, crossing, mt2, twist,
    /// scaling_convergence, ordinary_convergence, goldens, or all.
    #[arg(long)]
    suite: String,
    /// Rank parameter (n >= 2).
    #[arg(long)]
    n: u32,
    /// Seed for the deterministic parameter draws.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Tolerance override `family=value`, repeatable (e.g. `--tol ybe=1e-8`).
    #[arg(long = "tol", value_name = "FAMILY=TOL")]
    tols: Vec<String>,
    /// Also write one JSON report per line to this file.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    /// Degeneration path: scaling or ordinary.
    #[arg(long)]
    path: String,
    /// Rank parameter (n >= 2).
    #[arg(long)]
    n: u32,
    /// Additive spectral parameter of the target matrix.
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    beta: f64,
    /// Coupling xi.
    #[arg(long, default_value_t = 1.5)]
    xi: f64,
    /// Planck-like scale hbar.
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Number of path points (>= 2).
    #[arg(long, default_value_t = 4)]
    steps: usize,
    /// Truncation tolerance (falls back to RMX_DEFAULT_TOL, then 1e-12).
    #[arg(long)]
    tol: Option<f64>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn exit_code(err: &RmxError) -> i32 {
    match err {
        RmxError::Domain(_) | RmxError::Pole(_) | RmxError::Dimension(_) => 2,
        RmxError::NonConvergent(_) | RmxError::ConvergenceViolation(_) => 3,
    }
}

fn resolve_tol(flag: Option<f64>) -> Result<f64> {
    if let Some(tol) = flag {
        return Ok(tol);
    }
    match std::env::var("RMX_DEFAULT_TOL") {
        Ok(text) => text.trim().parse::<f64>().map_err(|_| {
            RmxError::Domain(format!(
                "RMX_DEFAULT_TOL must be a number, got {text:?}"
            ))
        }),
        Err(_) => Ok(1e-12),
    }
}

fn truncation_from(flag: Option<f64>) -> Result<TruncationControl> {
    let ctrl = TruncationControl {
        tol: resolve_tol(flag)?,
        ..TruncationControl::default()
    };
    ctrl.validate()?;
    Ok(ctrl)
}

fn require<T: Copy>(value: Option<T>, flag: &str, kind: &str) -> Result<T> {
    value.ok_or_else(|| RmxError::Domain(format!("eval --kind {kind} requires {flag}")))
}

fn c64_json(z: C64) -> serde_json::Value {
    json!({"re": z.re, "im": z.im})
}

fn write_text(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| RmxError::Domain(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_eval(args: &EvalArgs) -> Result<i32> {
    let ctrl = truncation_from(args.tol)?;
    let kind = args.kind.name();
    let (params, tensor, plain) = match args.kind {
        EvalKind::Sbar => {
            let z = require(args.z, "--z", kind)?;
            let w = require(args.w, "--w", kind)?;
            let tau = require(args.tau, "--tau", kind)?;
            let t = sbar_sum(z, w, tau, args.n, &ctrl)?;
            (
                json!({"z": c64_json(z), "w": c64_json(w), "tau": c64_json(tau)}),
                Some(t),
                None,
            )
        }
        EvalKind::SFull => {
            let v = require(args.v, "--v", kind)?;
            let w = require(args.w, "--w", kind)?;
            let tau = require(args.tau, "--tau", kind)?;
            let xi = require(args.xi, "--xi", kind)?;
            let beta = args.beta.unwrap_or(0.0);
            let hbar = args.hbar.unwrap_or(1.0);
            let sp = ScalarParams::new(args.n, xi, hbar, beta, w, tau)?;
            let t = s_full(v, &sp, &ctrl)?;
            (
                json!({
                    "v": c64_json(v), "w": c64_json(w), "tau": c64_json(tau),
                    "xi": xi, "hbar": hbar, "beta": beta,
                }),
                Some(t),
                None,
            )
        }
        EvalKind::RDy | EvalKind::RQ => {
            let beta = require(args.beta, "--beta", kind)?;
            let xi = require(args.xi, "--xi", kind)?;
            let hbar = args.hbar.unwrap_or(1.0);
            let include_kappa = !args.no_kappa;
            let p = DegenerateParams::new(args.n, beta, xi, hbar, include_kappa)?;
            let t = match args.kind {
                EvalKind::RDy => r_dy(&p)?,
                _ => r_q(&p)?,
            };
            (
                json!({
                    "beta": beta, "xi": xi, "hbar": hbar,
                    "include_kappa": include_kappa, "quad_tol": DEFAULT_QUAD_TOL,
                }),
                Some(t),
                None,
            )
        }
        EvalKind::TwistF => {
            let td = twist_f(args.n)?;
            (json!({}), None, Some(td.f12))
        }
    };
    let (matrix, charge, regularized) = match (&tensor, plain) {
        (Some(t), _) => (
            t.entries().clone(),
            Some(t.charge_conserving()),
            Some(t.regularized()),
        ),
        (None, Some(m)) => (m, None, None),
        (None, None) => unreachable!("every kind produces a matrix"),
    };
    let doc = MatrixDocument {
        kind: kind.to_string(),
        n: args.n,
        params,
        truncation: ctrl,
        seed: args.seed,
        charge_conserving: charge,
        regularized,
        matrix,
    };
    write_text(&args.output, &doc.to_json_string())?;
    let norm = max_norm(&doc.matrix);
    let threshold = 1e-12 * norm.max(1.0);
    let nonzero = match &tensor {
        Some(t) => t.nonzero_count(threshold),
        None => doc.matrix.iter().filter(|e| e.norm() > threshold).count(),
    };
    let flags = match (charge, regularized) {
        (Some(c), Some(r)) => format!(" charge_conserving={c} regularized={r}"),
        _ => String::new(),
    };
    eprintln!(
        "{kind}: n={} dim={} max_norm={} nonzero={nonzero}{flags}",
        args.n,
        doc.matrix.nrows(),
        format_f64_exact(norm)
    );
    Ok(0)
}

fn run_check(args: &CheckArgs) -> Result<i32> {
    let suite: SuiteKind = args.suite.parse()?;
    let mut overrides = TolOverrides::new();
    for pair in &args.tols {
        overrides.set_pair(pair)?;
    }
    let reports = run_suite(suite, args.n, args.seed, &overrides)?;
    let mut passed = 0usize;
    let mut lines = String::new();
    for report in &reports {
        if report.passed {
            passed += 1;
        }
        println!(
            "{} {} residual={:.3e} tol={:.1e}",
            if report.passed { "PASS" } else { "FAIL" },
            report.check_name,
            report.residual,
            report.tolerance
        );
        lines.push_str(&serde_json::to_string(&report.to_json()).expect("report serialization"));
        lines.push('\n');
    }
    let total = reports.len();
    println!(
        "{}: {passed}/{total} checks passed (suite={}, n={}, seed={})",
        if passed == total { "PASSED" } else { "FAILED" },
        suite.name(),
        args.n,
        args.seed
    );
    if let Some(path) = &args.output {
        std::fs::write(path, lines)
            .map_err(|e| RmxError::Domain(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(if passed == total { 0 } else { 1 })
}

fn run_scan(args: &ScanArgs) -> Result<i32> {
    let kind: ConvergenceKind = args.path.parse()?;
    let ctrl = truncation_from(args.tol)?;
    let p = DegenerateParams::new(args.n, args.beta, args.xi, args.hbar, false)?;
    let table = convergence_table(kind, &p, args.steps, &ctrl)?;
    let mut csv = String::from("step,point_re,point_im,distance,normalized_distance\n");
    for row in &table.rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.step,
            format_f64_exact(row.point.re),
            format_f64_exact(row.point.im),
            format_f64_exact(row.distance),
            format_f64_exact(row.normalized_distance)
        ));
    }
    write_text(&args.output, &csv)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<i32> {
    match &cli.command {
        Command::Eval(args) => run_eval(args),
        Command::Check(args) => run_check(args),
        Command::Scan(args) => run_scan(args),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code(&err));
        }
    }
}
