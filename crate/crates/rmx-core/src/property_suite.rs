//! Randomized verification suites over the identities the library is
//! built on, with deterministic seeding, per-check reports, and the
//! convergence tables for the two degeneration paths.
//!
//! Every suite draws parameters from documented ranges that keep the
//! matrices away from their poles:
//!
//! ```text
//! |v| ≤ 0.5 (and ≥ 0.05),   Re w ∈ [−0.3, 0.3],  Im w ∈ [0.2, 0.6],
//! Re τ ∈ [−0.5, 0.5],       Im τ ∈ [1, 3],        ξ ∈ [1.2, 3],
//! ℏ ∈ [0.5, 2],             |β| ≤ 0.8.
//! ```
//!
//! Draw `k` of a family is generated by a `ChaCha8` stream seeded from a
//! `splitmix64`-style mix of the suite seed, the family name, and `k`, so
//! results are bitwise reproducible for a given seed regardless of thread
//! scheduling.  A draw that lands on a pole is re-drawn from the same
//! stream (at most ten times); the retry count is recorded in the
//! parameter JSON of the report.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::cnum::{cx, C64};
use crate::error::{Result, RmxError};
use crate::matrix::{self, eye, kron, max_norm_diff};
use crate::qproducts::{kappa_beta_parts, ScalarParams};
use crate::theta_kernel::TruncationControl;
use crate::trig_limits::{
    ordinary_path_sample, r_dy, r_q, reference_n2, scaling_path_sample, sine_identity_residual,
    DegenerateParams, ReferenceKind, DEFAULT_QUAD_TOL,
};
use crate::twist::{mt2_residual, twist_f};
use crate::znrmatrix::{
    conjugate_by_permutation, embed, partial_transpose_second, s_full, sbar_sum, TensorMatrix,
};

/// The verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteKind {
    /// Yang–Baxter relation for all four matrix families.
    Ybe,
    /// Inversion unitarity `R₁₂(u)·R₂₁(−u) = 1`.
    Unitarity,
    /// Crossing-unitarity of the dressed matrix at coupled modulus `τ = ξw`.
    Crossing,
    /// Modular transformation of the bare matrix.
    Mt2,
    /// Fourier-matrix identities and the `R^Q → R^DY` twist.
    Twist,
    /// Scaling-path convergence table checks.
    ScalingConvergence,
    /// Ordinary-path convergence table checks.
    OrdinaryConvergence,
    /// `n = 2` reference matrices against the degenerate builders.
    Goldens,
    /// Union of everything above plus the scalar-identity extras.
    All,
}

impl SuiteKind {
    /// Stable identifier used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::Ybe => "ybe",
            SuiteKind::Unitarity => "unitarity",
            SuiteKind::Crossing => "crossing",
            SuiteKind::Mt2 => "mt2",
            SuiteKind::Twist => "twist",
            SuiteKind::ScalingConvergence => "scaling_convergence",
            SuiteKind::OrdinaryConvergence => "ordinary_convergence",
            SuiteKind::Goldens => "goldens",
            SuiteKind::All => "all",
        }
    }
}

impl std::str::FromStr for SuiteKind {
    type Err = RmxError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ybe" => Ok(SuiteKind::Ybe),
            "unitarity" => Ok(SuiteKind::Unitarity),
            "crossing" => Ok(SuiteKind::Crossing),
            "mt2" => Ok(SuiteKind::Mt2),
            "twist" => Ok(SuiteKind::Twist),
            "scaling_convergence" => Ok(SuiteKind::ScalingConvergence),
            "ordinary_convergence" => Ok(SuiteKind::OrdinaryConvergence),
            "goldens" => Ok(SuiteKind::Goldens),
            "all" => Ok(SuiteKind::All),
            other => Err(RmxError::Domain(format!(
                "unknown suite `{other}` (expected ybe, unitarity, crossing, mt2, twist, \
                 scaling_convergence, ordinary_convergence, goldens, or all)"
            ))),
        }
    }
}

/// Outcome of one randomized (or deterministic) check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    /// `family[index]`, e.g. `ybe_sbar[7]`.
    pub check_name: String,
    /// The exact parameters the check ran at, including the retry count.
    pub parameter_draw: serde_json::Value,
    /// Max-norm residual of the identity.
    pub residual: f64,
    /// Tolerance the residual was compared against.
    pub tolerance: f64,
    /// `residual < tolerance`.
    pub passed: bool,
    /// Wall-clock time of the check alone.
    pub wall_time: Duration,
    /// The suite seed the draw derives from.
    pub seed: u64,
}

impl CheckReport {
    /// JSON object for line-oriented report output (`wall_time` in ms).
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "check_name": self.check_name,
            "parameter_draw": self.parameter_draw,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "wall_time_ms": self.wall_time.as_secs_f64() * 1e3,
            "seed": self.seed,
        })
    }
}

/// Tolerance families that can be overridden, with their defaults.
pub const KNOWN_FAMILIES: [(&str, f64); 16] = [
    ("ybe", 1e-9),
    ("unitarity", 1e-8),
    ("crossing", 1e-7),
    ("mt2", 1e-9),
    ("twist", 1e-10),
    ("m_identity", 1e-13),
    ("f_inverse", 1e-13),
    ("n2_symmetry", 1e-12),
    ("goldens", 1e-12),
    ("kappa_structural", 1e-15),
    ("kappa_unitary", 1e-9),
    ("sine_identity", 1e-12),
    ("scaling_monotone", 1.0),
    ("scaling_final_normalized", 1e-4),
    ("ordinary_monotone", 1.0),
    ("ordinary_final", 1e-6),
];

/// Per-family tolerance overrides (families not present use defaults).
#[derive(Debug, Clone, Default)]
pub struct TolOverrides {
    map: BTreeMap<String, f64>,
}

impl TolOverrides {
    /// Empty override set: every family at its default.
    pub fn new() -> Self {
        Self::default()
    }

    /// Install an override.
    ///
    /// # Errors
    ///
    /// `Domain` for an unknown family or a non-positive tolerance.
    pub fn set(&mut self, family: &str, tol: f64) -> Result<()> {
        if !KNOWN_FAMILIES.iter().any(|(name, _)| *name == family) {
            return Err(RmxError::Domain(format!(
                "unknown tolerance family `{family}`"
            )));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(RmxError::Domain(format!(
                "tolerance for `{family}` must be positive, got {tol}"
            )));
        }
        self.map.insert(family.to_string(), tol);
        Ok(())
    }

    /// Parse `family=value` (e.g. `ybe=1e-12`) and install it.
    ///
    /// # Errors
    ///
    /// `Domain` on malformed input or unknown family.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (family, value) = pair.split_once('=').ok_or_else(|| {
            RmxError::Domain(format!("tolerance override `{pair}` is not family=value"))
        })?;
        let tol: f64 = value.trim().parse().map_err(|_| {
            RmxError::Domain(format!("tolerance override `{pair}` has a non-numeric value"))
        })?;
        self.set(family.trim(), tol)
    }

    /// Effective tolerance for a family (override or default).
    ///
    /// # Panics
    ///
    /// Panics if the family is not in [`KNOWN_FAMILIES`]; internal callers
    /// only pass known names.
    pub fn resolve(&self, family: &str) -> f64 {
        if let Some(tol) = self.map.get(family) {
            return *tol;
        }
        KNOWN_FAMILIES
            .iter()
            .find(|(name, _)| *name == family)
            .map(|(_, tol)| *tol)
            .unwrap_or_else(|| panic!("unknown tolerance family `{family}`"))
    }
}

// ---------------------------------------------------------------------------
// deterministic seeding and draw helpers
// ---------------------------------------------------------------------------

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn derive_seed(seed: u64, family: &str, idx: u64) -> u64 {
    let mut h = seed ^ splitmix64(idx.wrapping_add(1));
    for b in family.bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3);
    }
    splitmix64(h)
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

fn draw_w(rng: &mut ChaCha8Rng) -> C64 {
    cx(uniform(rng, -0.3, 0.3), uniform(rng, 0.2, 0.6))
}

fn draw_tau(rng: &mut ChaCha8Rng) -> C64 {
    cx(uniform(rng, -0.5, 0.5), uniform(rng, 1.0, 3.0))
}

fn draw_xi(rng: &mut ChaCha8Rng) -> f64 {
    uniform(rng, 1.2, 3.0)
}

fn draw_hbar(rng: &mut ChaCha8Rng) -> f64 {
    uniform(rng, 0.5, 2.0)
}

fn draw_beta(rng: &mut ChaCha8Rng) -> f64 {
    uniform(rng, -0.8, 0.8)
}

/// Real spectral parameter with `0.05 ≤ |v| ≤ 0.45`.
fn draw_v(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let v = uniform(rng, -0.45, 0.45);
        if v.abs() >= 0.05 {
            return v;
        }
    }
}

/// Three reals in `[−half, half]` with pairwise separation `≥ gap`.
fn draw_triple(rng: &mut ChaCha8Rng, half: f64, gap: f64) -> (f64, f64, f64) {
    loop {
        let a = uniform(rng, -half, half);
        let b = uniform(rng, -half, half);
        let c = uniform(rng, -half, half);
        if (a - b).abs() >= gap && (a - c).abs() >= gap && (b - c).abs() >= gap {
            return (a, b, c);
        }
    }
}

fn c64_json(z: C64) -> serde_json::Value {
    json!({"re": z.re, "im": z.im})
}

// ---------------------------------------------------------------------------
// residual builders
// ---------------------------------------------------------------------------

/// `max |R₁₂R₁₃R₂₃ − R₂₃R₁₃R₁₂|` for a difference-form family `u ↦ R(u)`.
fn ybe_residual<F>(r_of: F, u1: f64, u2: f64, u3: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<TensorMatrix>,
{
    let r12 = embed(&r_of(u1 - u2)?, 0, 1)?;
    let r13 = embed(&r_of(u1 - u3)?, 0, 2)?;
    let r23 = embed(&r_of(u2 - u3)?, 1, 2)?;
    let lhs = r12.dot(&r13).dot(&r23);
    let rhs = r23.dot(&r13).dot(&r12);
    max_norm_diff(&lhs, &rhs)
}

/// `max |R(u)·P R(−u) P − 1|`.
fn unitarity_residual<F>(r_of: F, u: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<TensorMatrix>,
{
    let fwd = r_of(u)?;
    let bwd = conjugate_by_permutation(&r_of(-u)?);
    let product = fwd.entries().dot(bwd.entries());
    max_norm_diff(&product, &eye(fwd.dim()))
}

/// Crossing-unitarity residual of the dressed matrix at coupled modulus:
/// `max |S₁₂(v)^{t₂} · S₂₁(−v−n)^{t₂} − 1|`.
fn crossing_residual(v: f64, params: &ScalarParams, ctrl: &TruncationControl) -> Result<f64> {
    let s12 = s_full(cx(v, 0.0), params, ctrl)?;
    let s21 = conjugate_by_permutation(&s_full(cx(-v - params.n as f64, 0.0), params, ctrl)?);
    let lhs = partial_transpose_second(&s12)
        .entries()
        .dot(partial_transpose_second(&s21).entries());
    max_norm_diff(&lhs, &eye(s12.dim()))
}

// ---------------------------------------------------------------------------
// generic family runner
// ---------------------------------------------------------------------------

struct DrawOutcome {
    residual: f64,
    params: serde_json::Value,
}

const MAX_POLE_RETRIES: u32 = 10;

/// Run `count` independent draws of one check family in parallel.
fn run_family<F>(
    family: &'static str,
    prefix: &str,
    count: usize,
    seed: u64,
    overrides: &TolOverrides,
    run_one: F,
) -> Result<Vec<CheckReport>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<DrawOutcome> + Sync,
{
    let tolerance = overrides.resolve(family);
    (0..count)
        .into_par_iter()
        .map(|idx| {
            let started = Instant::now();
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, family, idx as u64));
            let mut retries = 0u32;
            let outcome = loop {
                match run_one(&mut rng) {
                    Ok(outcome) => break outcome,
                    Err(RmxError::Pole(msg)) => {
                        retries += 1;
                        if retries > MAX_POLE_RETRIES {
                            return Err(RmxError::Pole(format!(
                                "{family}[{idx}]: still on a pole after {MAX_POLE_RETRIES} \
                                 redraws: {msg}"
                            )));
                        }
                    }
                    Err(other) => return Err(other),
                }
            };
            let mut params = outcome.params;
            if let Some(obj) = params.as_object_mut() {
                obj.insert("retries".to_string(), json!(retries));
            }
            Ok(CheckReport {
                check_name: format!("{prefix}[{idx}]"),
                parameter_draw: params,
                residual: outcome.residual,
                tolerance,
                passed: outcome.residual < tolerance,
                wall_time: started.elapsed(),
                seed,
            })
        })
        .collect()
}

/// A single deterministic (no-draw) report.
fn fixed_report(
    family: &'static str,
    name: &str,
    params: serde_json::Value,
    residual: f64,
    seed: u64,
    overrides: &TolOverrides,
    started: Instant,
) -> CheckReport {
    let tolerance = overrides.resolve(family);
    CheckReport {
        check_name: name.to_string(),
        parameter_draw: params,
        residual,
        tolerance,
        passed: residual < tolerance,
        wall_time: started.elapsed(),
        seed,
    }
}

// ---------------------------------------------------------------------------
// the suites
// ---------------------------------------------------------------------------

fn ybe_draw_count(n: u32) -> usize {
    if n == 2 {
        20
    } else {
        5
    }
}

fn suite_ybe(n: u32, seed: u64, ov: &TolOverrides, ctrl: &TruncationControl) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    let count = ybe_draw_count(n);
    reports.extend(run_family("ybe", "ybe_sbar", count, seed, ov, |rng| {
        let w = draw_w(rng);
        let tau = draw_tau(rng);
        let (z1, z2, z3) = draw_triple(rng, 0.35, 0.05);
        let residual = ybe_residual(
            |z| sbar_sum(cx(z, 0.0), w, tau, n, ctrl),
            z1,
            z2,
            z3,
        )?;
        Ok(DrawOutcome {
            residual,
            params: json!({
                "n": n, "w": c64_json(w), "tau": c64_json(tau),
                "z1": z1, "z2": z2, "z3": z3,
            }),
        })
    })?);
    reports.extend(run_family("ybe", "ybe_s_full", count, seed, ov, |rng| {
        let w = draw_w(rng);
        let tau = draw_tau(rng);
        let xi = draw_xi(rng);
        let params = ScalarParams::new(n, xi, 1.0, 0.0, w, tau)?;
        let (v1, v2, v3) = draw_triple(rng, 0.35, 0.05);
        let residual = ybe_residual(|v| s_full(cx(v, 0.0), &params, ctrl), v1, v2, v3)?;
        Ok(DrawOutcome {
            residual,
            params: json!({
                "n": n, "xi": xi, "w": c64_json(w), "tau": c64_json(tau),
                "v1": v1, "v2": v2, "v3": v3,
            }),
        })
    })?);
    reports.extend(run_family("ybe", "ybe_r_dy", count, seed, ov, |rng| {
        let xi = draw_xi(rng);
        let hbar = draw_hbar(rng);
        let (b1, b2, b3) = draw_triple(rng, 0.4, 0.02);
        let residual = ybe_residual(
            |beta| r_dy(&DegenerateParams::new(n, beta, xi, hbar, false)?),
            b1,
            b2,
            b3,
        )?;
        Ok(DrawOutcome {
            residual,
            params: json!({"n": n, "xi": xi, "hbar": hbar, "beta1": b1, "beta2": b2, "beta3": b3}),
        })
    })?);
    reports.extend(run_family("ybe", "ybe_r_q", count, seed, ov, |rng| {
        let xi = draw_xi(rng);
        let hbar = draw_hbar(rng);
        let (b1, b2, b3) = draw_triple(rng, 0.4, 0.02);
        let residual = ybe_residual(
            |beta| r_q(&DegenerateParams::new(n, beta, xi, hbar, false)?),
            b1,
            b2,
            b3,
        )?;
        Ok(DrawOutcome {
            residual,
            params: json!({"n": n, "xi": xi, "hbar": hbar, "beta1": b1, "beta2": b2, "beta3": b3}),
        })
    })?);
    Ok(reports)
}

fn suite_unitarity(
    n: u32,
    seed: u64,
    ov: &TolOverrides,
    ctrl: &TruncationControl,
) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    reports.extend(run_family("unitarity", "unitarity_s_full", 10, seed, ov, |rng| {
        let w = draw_w(rng);
        let tau = draw_tau(rng);
        let xi = draw_xi(rng);
        let params = ScalarParams::new(n, xi, 1.0, 0.0, w, tau)?;
        let v = draw_v(rng);
        let residual = unitarity_residual(|u| s_full(cx(u, 0.0), &params, ctrl), v)?;
        Ok(DrawOutcome {
            residual,
            params: json!({"n": n, "xi": xi, "w": c64_json(w), "tau": c64_json(tau), "v": v}),
        })
    })?);
    reports.extend(run_family("unitarity", "unitarity_r_dy", 10, seed, ov, |rng| {
        let xi = draw_xi(rng);
        let hbar = draw_hbar(rng);
        let beta = draw_beta(rng);
        let residual = unitarity_residual(
            |b| r_dy(&DegenerateParams::new(n, b, xi, hbar, true)?),
            beta,
        )?;
        Ok(DrawOutcome {
            residual,
            params: json!({"n": n, "xi": xi, "hbar": hbar, "beta": beta, "include_kappa": true}),
        })
    })?);
    Ok(reports)
}

fn suite_crossing(
    n: u32,
    seed: u64,
    ov: &TolOverrides,
    ctrl: &TruncationControl,
) -> Result<Vec<CheckReport>> {
    run_family("crossing", "crossing_s_full", 10, seed, ov, |rng| {
        let w = draw_w(rng);
        let xi = draw_xi(rng);
        let params = ScalarParams::with_coupled_modulus(n, xi, 1.0, 0.0, w)?;
        let v = draw_v(rng);
        let residual = crossing_residual(v, &params, ctrl)?;
        Ok(DrawOutcome {
            residual,
            params: json!({
                "n": n, "xi": xi, "w": c64_json(w), "tau": c64_json(params.tau), "v": v,
            }),
        })
    })
}

fn suite_mt2(n: u32, seed: u64, ov: &TolOverrides, ctrl: &TruncationControl) -> Result<Vec<CheckReport>> {
    run_family("mt2", "mt2", 30, seed, ov, |rng| {
        let z = cx(uniform(rng, -0.4, 0.4), uniform(rng, -0.2, 0.2));
        let w = draw_w(rng);
        let tau = draw_tau(rng);
        let residual = mt2_residual(z, w, tau, n, ctrl)?;
        Ok(DrawOutcome {
            residual,
            params: json!({"n": n, "z": c64_json(z), "w": c64_json(w), "tau": c64_json(tau)}),
        })
    })
}

fn suite_twist(n: u32, seed: u64, ov: &TolOverrides) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    // deterministic structure checks on the Fourier matrix
    let started = Instant::now();
    let m = crate::twist::m_matrix(n)?;
    let m_inv = m.mapv(|e| e.conj() / n as f64);
    let (h, g) = (crate::znrmatrix::build_h(n), crate::znrmatrix::build_g(n));
    let r_g = max_norm_diff(&m.dot(&g).dot(&m_inv), &matrix::invert(&h)?)?;
    reports.push(fixed_report(
        "m_identity",
        "m_identity_g",
        json!({"n": n}),
        r_g,
        seed,
        ov,
        started,
    ));
    let started = Instant::now();
    let r_h = max_norm_diff(&m.dot(&h).dot(&m_inv), &g)?;
    reports.push(fixed_report(
        "m_identity",
        "m_identity_h",
        json!({"n": n}),
        r_h,
        seed,
        ov,
        started,
    ));
    let started = Instant::now();
    let td = twist_f(n)?;
    let r_f = max_norm_diff(&td.f12.dot(&td.f12_inv), &eye((n * n) as usize))?;
    reports.push(fixed_report(
        "f_inverse",
        "f_inverse",
        json!({"n": n}),
        r_f,
        seed,
        ov,
        started,
    ));
    // randomized twist residuals
    reports.extend(run_family("twist", "twist_residual", 30, seed, ov, |rng| {
        let xi = draw_xi(rng);
        let hbar = draw_hbar(rng);
        let beta = draw_beta(rng);
        let p = DegenerateParams::new(n, beta, xi, hbar, false)?;
        let residual = crate::twist::twist_residual(&p)?;
        Ok(DrawOutcome {
            residual,
            params: json!({"n": n, "xi": xi, "hbar": hbar, "beta": beta}),
        })
    })?);
    if n == 2 {
        reports.extend(run_family("n2_symmetry", "n2_perm_symmetry", 10, seed, ov, |rng| {
            let xi = draw_xi(rng);
            let hbar = draw_hbar(rng);
            let beta = draw_beta(rng);
            let r = r_q(&DegenerateParams::new(2, beta, xi, hbar, false)?)?;
            let prp = conjugate_by_permutation(&r);
            let residual = max_norm_diff(prp.entries(), r.entries())?;
            Ok(DrawOutcome {
                residual,
                params: json!({"n": 2, "xi": xi, "hbar": hbar, "beta": beta}),
            })
        })?);
        reports.extend(run_family("n2_symmetry", "n2_spin_symmetry", 10, seed, ov, |rng| {
            let xi = draw_xi(rng);
            let hbar = draw_hbar(rng);
            let beta = draw_beta(rng);
            let r = r_q(&DegenerateParams::new(2, beta, xi, hbar, false)?)?;
            let mut sz = matrix::zeros(2);
            sz[[0, 0]] = cx(1.0, 0.0);
            sz[[1, 1]] = cx(-1.0, 0.0);
            let szsz = kron(&sz, &sz);
            let conj = szsz.dot(r.entries()).dot(&szsz);
            let residual = max_norm_diff(&conj, r.entries())?;
            Ok(DrawOutcome {
                residual,
                params: json!({"n": 2, "xi": xi, "hbar": hbar, "beta": beta}),
            })
        })?);
    }
    Ok(reports)
}

fn suite_goldens(n: u32, seed: u64, ov: &TolOverrides) -> Result<Vec<CheckReport>> {
    if n != 2 {
        return Err(RmxError::Domain(format!(
            "goldens: reference matrices are defined for n = 2 only, got n = {n}"
        )));
    }
    let mut reports = Vec::new();
    // 20 points, −0.76 … 0.76 in steps of 0.08; never hits β = 0.
    let betas: Vec<f64> = (0..20).map(|k| -0.76 + 0.08 * k as f64).collect();
    for (idx, &beta) in betas.iter().enumerate() {
        let p = DegenerateParams::new(2, beta, 1.5, 1.0, true)?;
        let started = Instant::now();
        let d8 = max_norm_diff(
            r_dy(&p)?.entries(),
            reference_n2(ReferenceKind::EightVertex, &p)?.entries(),
        )?;
        reports.push(fixed_report(
            "goldens",
            &format!("golden_eight_vertex[{idx}]"),
            json!({"n": 2, "beta": beta, "xi": 1.5, "hbar": 1.0, "include_kappa": true}),
            d8,
            seed,
            ov,
            started,
        ));
        let started = Instant::now();
        let d6 = max_norm_diff(
            r_q(&p)?.entries(),
            reference_n2(ReferenceKind::SixVertex, &p)?.entries(),
        )?;
        reports.push(fixed_report(
            "goldens",
            &format!("golden_six_vertex[{idx}]"),
            json!({"n": 2, "beta": beta, "xi": 1.5, "hbar": 1.0, "include_kappa": true}),
            d6,
            seed,
            ov,
            started,
        ));
    }
    Ok(reports)
}

// ---------------------------------------------------------------------------
// convergence tables
// ---------------------------------------------------------------------------

/// Which degeneration path a table samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceKind {
    /// `w_k = 0.5i·2^{−k}`, coupled modulus, target `R^DY` (stripped).
    Scaling,
    /// `τ_k = 5i·2^{k}`, target `R^Q` (stripped).
    Ordinary,
}

impl ConvergenceKind {
    /// Stable identifier (`scaling` / `ordinary`).
    pub fn name(&self) -> &'static str {
        match self {
            ConvergenceKind::Scaling => "scaling",
            ConvergenceKind::Ordinary => "ordinary",
        }
    }
}

impl std::str::FromStr for ConvergenceKind {
    type Err = RmxError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scaling" => Ok(ConvergenceKind::Scaling),
            "ordinary" => Ok(ConvergenceKind::Ordinary),
            other => Err(RmxError::Domain(format!(
                "unknown convergence kind `{other}` (expected scaling or ordinary)"
            ))),
        }
    }
}

/// One sampled point of a degeneration path.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    /// Step index along the path.
    pub step: usize,
    /// Path parameter (`w` for scaling, `τ` for ordinary).
    pub point: C64,
    /// `max |sample − target|` as computed.
    pub distance: f64,
    /// Distance after rescaling the sample by the entry ratio at the
    /// target's largest entry, which removes the path's exact scalar phase
    /// (an `O(w)` effect on the scaling path).
    pub normalized_distance: f64,
}

/// A full sampled path.
#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    /// Which path was sampled.
    pub kind: ConvergenceKind,
    /// One row per step, in path order.
    pub rows: Vec<ConvergenceRow>,
}

/// Sample a degeneration path without enforcing monotonicity.
///
/// # Errors
///
/// `Domain` for fewer than two steps or invalid parameters; evaluation
/// errors propagated.
pub fn convergence_rows(
    kind: ConvergenceKind,
    p: &DegenerateParams,
    steps: usize,
    ctrl: &TruncationControl,
) -> Result<Vec<ConvergenceRow>> {
    if steps < 2 {
        return Err(RmxError::Domain(format!(
            "convergence table: need at least 2 steps, got {steps}"
        )));
    }
    let stripped = p.stripped();
    let target = match kind {
        ConvergenceKind::Scaling => r_dy(&stripped)?,
        ConvergenceKind::Ordinary => r_q(&stripped)?,
    };
    // entry of largest magnitude in the target, used for phase removal
    let (mut arg, mut best) = ((0usize, 0usize), -1.0f64);
    for (pos, e) in target.entries().indexed_iter() {
        if e.norm() > best {
            best = e.norm();
            arg = pos;
        }
    }
    let mut rows = Vec::with_capacity(steps);
    for step in 0..steps {
        let (point, sample) = match kind {
            ConvergenceKind::Scaling => {
                let w = cx(0.0, 0.5 * 0.5f64.powi(step as i32));
                scaling_path_sample(&stripped, w, ctrl)?
            }
            ConvergenceKind::Ordinary => {
                let tau = cx(0.0, 5.0 * 2.0f64.powi(step as i32));
                ordinary_path_sample(&stripped, tau, ctrl)?
            }
        };
        let distance = max_norm_diff(sample.entries(), target.entries())?;
        let sample_at_arg = sample.entries()[arg];
        let normalized_distance = if sample_at_arg.norm() < 1e-300 {
            distance
        } else {
            let ratio = target.entries()[arg] / sample_at_arg;
            let rescaled = sample.entries().mapv(|e| e * ratio);
            max_norm_diff(&rescaled, target.entries())?
        };
        rows.push(ConvergenceRow { step, point, distance, normalized_distance });
    }
    Ok(rows)
}

/// Sample a degeneration path and enforce convergence: the scaling path
/// must decrease strictly in both distance columns, the ordinary path in
/// the literal column.
///
/// # Errors
///
/// `ConvergenceViolation` when a distance fails to decrease; everything
/// [`convergence_rows`] can raise.
pub fn convergence_table(
    kind: ConvergenceKind,
    p: &DegenerateParams,
    steps: usize,
    ctrl: &TruncationControl,
) -> Result<ConvergenceTable> {
    let rows = convergence_rows(kind, p, steps, ctrl)?;
    for pair in rows.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        if next.distance >= prev.distance {
            return Err(RmxError::ConvergenceViolation(format!(
                "{} path distance did not decrease at step {}: {:.6e} -> {:.6e}",
                kind.name(),
                next.step,
                prev.distance,
                next.distance
            )));
        }
        if kind == ConvergenceKind::Scaling && next.normalized_distance >= prev.normalized_distance
        {
            return Err(RmxError::ConvergenceViolation(format!(
                "scaling path normalized distance did not decrease at step {}: {:.6e} -> {:.6e}",
                next.step, prev.normalized_distance, next.normalized_distance
            )));
        }
    }
    Ok(ConvergenceTable { kind, rows })
}

fn convergence_params(n: u32) -> Result<DegenerateParams> {
    DegenerateParams::new(n, 0.3, 1.5, 1.0, false)
}

fn rows_json(rows: &[ConvergenceRow]) -> serde_json::Value {
    json!(rows
        .iter()
        .map(|r| json!({
            "step": r.step,
            "point": c64_json(r.point),
            "distance": r.distance,
            "normalized_distance": r.normalized_distance,
        }))
        .collect::<Vec<_>>())
}

/// Largest successive ratio over the given column; `< 1` means strictly
/// decreasing.
fn worst_ratio(rows: &[ConvergenceRow], normalized: bool) -> f64 {
    rows.windows(2)
        .map(|pair| {
            let (a, b) = if normalized {
                (pair[0].normalized_distance, pair[1].normalized_distance)
            } else {
                (pair[0].distance, pair[1].distance)
            };
            if a == 0.0 {
                f64::INFINITY
            } else {
                b / a
            }
        })
        .fold(0.0f64, f64::max)
}

fn suite_scaling(
    n: u32,
    seed: u64,
    ov: &TolOverrides,
    ctrl: &TruncationControl,
) -> Result<Vec<CheckReport>> {
    let p = convergence_params(n)?;
    let started = Instant::now();
    let rows = convergence_rows(ConvergenceKind::Scaling, &p, 4, ctrl)?;
    let params = json!({
        "n": n, "beta": 0.3, "xi": 1.5, "hbar": 1.0, "steps": 4, "rows": rows_json(&rows),
    });
    let monotone = worst_ratio(&rows, false).max(worst_ratio(&rows, true));
    let final_normalized = rows.last().map_or(f64::INFINITY, |r| r.normalized_distance);
    Ok(vec![
        fixed_report(
            "scaling_monotone",
            "scaling_monotone",
            params.clone(),
            monotone,
            seed,
            ov,
            started,
        ),
        fixed_report(
            "scaling_final_normalized",
            "scaling_final_normalized",
            params,
            final_normalized,
            seed,
            ov,
            started,
        ),
    ])
}

fn suite_ordinary(
    n: u32,
    seed: u64,
    ov: &TolOverrides,
    ctrl: &TruncationControl,
) -> Result<Vec<CheckReport>> {
    let p = convergence_params(n)?;
    let started = Instant::now();
    let rows = convergence_rows(ConvergenceKind::Ordinary, &p, 3, ctrl)?;
    let params = json!({
        "n": n, "beta": 0.3, "xi": 1.5, "hbar": 1.0, "steps": 3, "rows": rows_json(&rows),
    });
    let monotone = worst_ratio(&rows, false);
    let final_literal = rows.last().map_or(f64::INFINITY, |r| r.distance);
    Ok(vec![
        fixed_report(
            "ordinary_monotone",
            "ordinary_monotone",
            params.clone(),
            monotone,
            seed,
            ov,
            started,
        ),
        fixed_report(
            "ordinary_final",
            "ordinary_final",
            params,
            final_literal,
            seed,
            ov,
            started,
        ),
    ])
}

fn suite_scalar_extras(n: u32, seed: u64, ov: &TolOverrides) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    let started = Instant::now();
    let at_zero = kappa_beta_parts(n, 1.7, 1.1, 0.0, DEFAULT_QUAD_TOL)?;
    reports.push(fixed_report(
        "kappa_structural",
        "kappa_zero",
        json!({"n": n, "xi": 1.7, "hbar": 1.1, "beta": 0.0}),
        (at_zero - cx(1.0, 0.0)).norm(),
        seed,
        ov,
        started,
    ));
    let started = Instant::now();
    let at_xi_one = kappa_beta_parts(n, 1.0, 1.1, 0.4, DEFAULT_QUAD_TOL)?;
    reports.push(fixed_report(
        "kappa_structural",
        "kappa_xi_one",
        json!({"n": n, "xi": 1.0, "hbar": 1.1, "beta": 0.4}),
        (at_xi_one - cx(1.0, 0.0)).norm(),
        seed,
        ov,
        started,
    ));
    reports.extend(run_family("kappa_unitary", "kappa_unitary", 20, seed, ov, |rng| {
        let xi = draw_xi(rng);
        let hbar = draw_hbar(rng);
        let beta = draw_beta(rng);
        let plus = kappa_beta_parts(n, xi, hbar, beta, DEFAULT_QUAD_TOL)?;
        let minus = kappa_beta_parts(n, xi, hbar, -beta, DEFAULT_QUAD_TOL)?;
        Ok(DrawOutcome {
            residual: (plus * minus - cx(1.0, 0.0)).norm(),
            params: json!({"n": n, "xi": xi, "hbar": hbar, "beta": beta}),
        })
    })?);
    reports.extend(run_family("sine_identity", "sine_identity", 100, seed, ov, |rng| {
        let n_local = rng.gen_range(2..=6u32);
        let x = loop {
            let candidate = cx(uniform(rng, -1.0, 1.0), uniform(rng, -0.5, 0.5));
            if candidate.norm() >= 0.05 {
                break candidate;
            }
        };
        Ok(DrawOutcome {
            residual: sine_identity_residual(x, n_local)?,
            params: json!({"n": n_local, "x": c64_json(x)}),
        })
    })?);
    Ok(reports)
}

/// Run one suite (or all of them) at the given rank and seed.
///
/// For `SuiteKind::All` the goldens section is included only at `n = 2`
/// (the reference matrices do not exist elsewhere); requesting
/// `SuiteKind::Goldens` directly at `n ≠ 2` is a `Domain` error.
///
/// # Errors
///
/// `Domain` for `n < 2` or suite/rank mismatches; evaluation errors
/// propagated (a draw that stays on a pole after ten redraws surfaces as
/// `Pole`).
pub fn run_suite(
    kind: SuiteKind,
    n: u32,
    seed: u64,
    overrides: &TolOverrides,
) -> Result<Vec<CheckReport>> {
    if n < 2 {
        return Err(RmxError::Domain(format!("suite: n must be >= 2, got {n}")));
    }
    let ctrl = TruncationControl::default();
    match kind {
        SuiteKind::Ybe => suite_ybe(n, seed, overrides, &ctrl),
        SuiteKind::Unitarity => suite_unitarity(n, seed, overrides, &ctrl),
        SuiteKind::Crossing => suite_crossing(n, seed, overrides, &ctrl),
        SuiteKind::Mt2 => suite_mt2(n, seed, overrides, &ctrl),
        SuiteKind::Twist => suite_twist(n, seed, overrides),
        SuiteKind::ScalingConvergence => suite_scaling(n, seed, overrides, &ctrl),
        SuiteKind::OrdinaryConvergence => suite_ordinary(n, seed, overrides, &ctrl),
        SuiteKind::Goldens => suite_goldens(n, seed, overrides),
        SuiteKind::All => {
            let mut reports = Vec::new();
            reports.extend(suite_ybe(n, seed, overrides, &ctrl)?);
            reports.extend(suite_unitarity(n, seed, overrides, &ctrl)?);
            reports.extend(suite_crossing(n, seed, overrides, &ctrl)?);
            reports.extend(suite_mt2(n, seed, overrides, &ctrl)?);
            reports.extend(suite_twist(n, seed, overrides)?);
            reports.extend(suite_scaling(n, seed, overrides, &ctrl)?);
            reports.extend(suite_ordinary(n, seed, overrides, &ctrl)?);
            if n == 2 {
                reports.extend(suite_goldens(n, seed, overrides)?);
            }
            reports.extend(suite_scalar_extras(n, seed, overrides)?);
            Ok(reports)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_kind_names_round_trip() {
        for kind in [
            SuiteKind::Ybe,
            SuiteKind::Unitarity,
            SuiteKind::Crossing,
            SuiteKind::Mt2,
            SuiteKind::Twist,
            SuiteKind::ScalingConvergence,
            SuiteKind::OrdinaryConvergence,
            SuiteKind::Goldens,
            SuiteKind::All,
        ] {
            let back: SuiteKind = kind.name().parse().unwrap();
            assert_eq!(back, kind);
        }
        assert!("ryb".parse::<SuiteKind>().is_err());
    }

    #[test]
    fn tolerance_overrides_resolve_and_validate() {
        let mut ov = TolOverrides::new();
        assert_eq!(ov.resolve("ybe"), 1e-9);
        ov.set_pair("ybe=1e-12").unwrap();
        assert_eq!(ov.resolve("ybe"), 1e-12);
        assert_eq!(ov.resolve("twist"), 1e-10);
        assert!(ov.set_pair("nonsense=1e-3").is_err());
        assert!(ov.set_pair("ybe=-1").is_err());
        assert!(ov.set_pair("ybe").is_err());
        assert!(ov.set_pair("ybe=abc").is_err());
    }

    #[test]
    fn reports_are_deterministic_for_a_seed() {
        let ov = TolOverrides::new();
        let first = run_suite(SuiteKind::Mt2, 2, 42, &ov).unwrap();
        let second = run_suite(SuiteKind::Mt2, 2, 42, &ov).unwrap();
        assert_eq!(first.len(), second.len());
        for (a, b) in first.iter().zip(second.iter()) {
            assert_eq!(a.check_name, b.check_name);
            assert_eq!(a.parameter_draw, b.parameter_draw);
            assert_eq!(a.residual.to_bits(), b.residual.to_bits());
            assert_eq!(a.tolerance, b.tolerance);
            assert_eq!(a.passed, b.passed);
            assert_eq!(a.seed, b.seed);
        }
        let other_seed = run_suite(SuiteKind::Mt2, 2, 43, &ov).unwrap();
        assert_ne!(
            first[0].parameter_draw, other_seed[0].parameter_draw,
            "different seeds must draw different parameters"
        );
    }

    #[test]
    fn ybe_suite_passes_at_n2() {
        let reports = run_suite(SuiteKind::Ybe, 2, 7, &TolOverrides::new()).unwrap();
        assert_eq!(reports.len(), 80);
        for r in &reports {
            assert!(
                r.passed,
                "{} failed: residual {:.3e} vs tol {:.1e} at {}",
                r.check_name, r.residual, r.tolerance, r.parameter_draw
            );
        }
    }

    #[test]
    fn twist_suite_shape_and_results() {
        let reports = run_suite(SuiteKind::Twist, 2, 11, &TolOverrides::new()).unwrap();
        // 3 fixed + 30 twist draws + 2×10 symmetry draws at n = 2
        assert_eq!(reports.len(), 53);
        assert!(reports.iter().all(|r| r.passed));
        let n3 = run_suite(SuiteKind::Twist, 3, 11, &TolOverrides::new()).unwrap();
        assert_eq!(n3.len(), 33, "no n=2 symmetry checks away from n = 2");
    }

    #[test]
    fn goldens_suite_requires_n2() {
        assert!(matches!(
            run_suite(SuiteKind::Goldens, 3, 1, &TolOverrides::new()),
            Err(RmxError::Domain(_))
        ));
        let reports = run_suite(SuiteKind::Goldens, 2, 1, &TolOverrides::new()).unwrap();
        assert_eq!(reports.len(), 40);
        assert!(reports.iter().all(|r| r.passed));
    }

    #[test]
    fn convergence_tables_enforce_their_contracts() {
        let ctrl = TruncationControl::default();
        let p = DegenerateParams::new(2, 0.3, 1.5, 1.0, false).unwrap();
        assert!(matches!(
            convergence_table(ConvergenceKind::Scaling, &p, 1, &ctrl),
            Err(RmxError::Domain(_))
        ));
        let table = convergence_table(ConvergenceKind::Scaling, &p, 4, &ctrl).unwrap();
        assert_eq!(table.rows.len(), 4);
        assert!(table.rows[3].normalized_distance < 1e-4);
        let table = convergence_table(ConvergenceKind::Ordinary, &p, 3, &ctrl).unwrap();
        assert!(table.rows[2].distance < 1e-6);
        assert!("sideways".parse::<ConvergenceKind>().is_err());
    }

    #[test]
    fn convergence_suites_report_ratios_below_one() {
        let ov = TolOverrides::new();
        for kind in [SuiteKind::ScalingConvergence, SuiteKind::OrdinaryConvergence] {
            let reports = run_suite(kind, 2, 3, &ov).unwrap();
            assert_eq!(reports.len(), 2);
            for r in &reports {
                assert!(r.passed, "{} residual {:.3e}", r.check_name, r.residual);
            }
        }
    }

    #[test]
    fn suite_rejects_rank_below_two() {
        assert!(run_suite(SuiteKind::Ybe, 1, 0, &TolOverrides::new()).is_err());
    }
}
