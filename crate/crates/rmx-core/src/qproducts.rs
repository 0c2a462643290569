//! Multi-nome infinite products, the scalar dressing `g1`, the elliptic
//! prefactor of the dressed R-matrix, and the `κ(β)` quadrature.
//!
//! The building block is the multi-nome product
//!
//! ```text
//! (z; p₁, …, p_m) = Π_{k₁,…,k_m ≥ 0} (1 − z·p₁^{k₁} ⋯ p_m^{k_m}),   |p_i| < 1,
//! ```
//!
//! from which the curly bracket `{y} = (y; e^{2iπτ}, x^{2n})` with
//! `x = e^{iπw}` is formed, then
//!
//! ```text
//! g1(v) = {x^{2v}·x²}·{x^{2v}·x^{2n+2ξ−2}} / ( {x^{2v}·x^{2n}}·{x^{2v}·x^{2ξ}} ),
//! prefactor(v) = x^{2v(1/n − 1)} · g1(v) / g1(−v),
//! ```
//!
//! with the `x`-power taken through the explicit exponential
//! `exp{2πi·w·v·(1/n − 1)}` (principal determination, no multivalued
//! power).  Finally `κ(β)` is the pure phase
//!
//! ```text
//! κ(β) = exp{ +2i ∫₀^∞ sh((n−1)ℏt)·sh((ξ−1)ℏt)·sin(2βt)
//!                       / ( sh(ℏξt)·sh(nℏt)·t ) dt },
//! ```
//!
//! the scaling limit of `prefactor(v)` at `v = iβ/ℏ` with coupled modulus
//! `τ = ξw`; the integrand is `O(1)` at `t → 0` (removable) and decays as
//! `e^{−2ℏ·min(1,ξ)·t}`, so a finite upper limit with an explicit tail
//! estimate suffices.

use std::f64::consts::PI;

use crate::cnum::{cx, C64};
use crate::error::{Result, RmxError};
use crate::theta_kernel::{TruncationControl, DEFAULT_POLE_FLOOR};

/// Ordered list of nomes `p₁, …, p_m`, each strictly inside the unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct NomeSet {
    nomes: Vec<C64>,
}

impl NomeSet {
    /// # Errors
    ///
    /// `Domain` when the list is empty or any `|p_i| ≥ 1` (or non-finite).
    pub fn new(nomes: Vec<C64>) -> Result<Self> {
        if nomes.is_empty() {
            return Err(RmxError::Domain("nome set: empty".to_string()));
        }
        for (idx, p) in nomes.iter().enumerate() {
            if !p.re.is_finite() || !p.im.is_finite() || p.norm() >= 1.0 {
                return Err(RmxError::Domain(format!(
                    "nome set: |p_{idx}| must be < 1, got |{p}| = {}",
                    p.norm()
                )));
            }
        }
        Ok(Self { nomes })
    }

    /// The nomes in construction order.
    pub fn nomes(&self) -> &[C64] {
        &self.nomes
    }
}

/// Full parameter tuple of the dressed elliptic R-matrix and its
/// degenerations.  Construction enforces every domain constraint, so the
/// derived nomes `x² = e^{2iπw}`, `x^{2n} = e^{2iπnw}`, `q = e^{2iπτ}` are
/// automatically inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarParams {
    /// Rank parameter of the Z_n family, `n ≥ 2`.
    pub n: u32,
    /// Coupling `ξ > 0`.
    pub xi: f64,
    /// Planck-like scale `ℏ > 0`.
    pub hbar: f64,
    /// Real spectral parameter of the degenerate matrices.
    pub beta: f64,
    /// Elliptic half-period ratio entering `x = e^{iπw}`; `Im w > 0`.
    pub w: C64,
    /// Modular parameter; `Im τ > 0`.
    pub tau: C64,
}

impl ScalarParams {
    /// # Errors
    ///
    /// `Domain` on any violated constraint (`n ≥ 2`, `ξ > 0`, `ℏ > 0`,
    /// finite `β`, `Im w > 0`, `Im τ > 0`).
    pub fn new(n: u32, xi: f64, hbar: f64, beta: f64, w: C64, tau: C64) -> Result<Self> {
        if n < 2 {
            return Err(RmxError::Domain(format!("params: n must be >= 2, got {n}")));
        }
        if !(xi.is_finite() && xi > 0.0) {
            return Err(RmxError::Domain(format!("params: xi must be positive, got {xi}")));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(RmxError::Domain(format!(
                "params: hbar must be positive, got {hbar}"
            )));
        }
        if !beta.is_finite() {
            return Err(RmxError::Domain("params: beta must be finite".to_string()));
        }
        if !w.re.is_finite() || !w.im.is_finite() || w.im <= 0.0 {
            return Err(RmxError::Domain(format!(
                "params: Im(w) must be positive (|x| < 1), got {}",
                w.im
            )));
        }
        if !tau.re.is_finite() || !tau.im.is_finite() || tau.im <= 0.0 {
            return Err(RmxError::Domain(format!(
                "params: Im(tau) must be positive, got {}",
                tau.im
            )));
        }
        Ok(Self { n, xi, hbar, beta, w, tau })
    }

    /// Parameters with the coupled modulus `τ = ξ·w`, the regime in which
    /// the dressed matrix satisfies crossing-unitarity.
    pub fn with_coupled_modulus(n: u32, xi: f64, hbar: f64, beta: f64, w: C64) -> Result<Self> {
        Self::new(n, xi, hbar, beta, w, xi * w)
    }

    /// `x = e^{iπw}`.
    pub fn x(&self) -> C64 {
        (cx(0.0, PI) * self.w).exp()
    }

    /// `q = e^{2iπτ}`.
    pub fn q(&self) -> C64 {
        (cx(0.0, 2.0 * PI) * self.tau).exp()
    }

    /// `x^{2n} = e^{2iπnw}`.
    pub fn x2n(&self) -> C64 {
        (cx(0.0, 2.0 * PI) * (self.n as f64) * self.w).exp()
    }

    /// The curly-bracket nome pair `(e^{2iπτ}, x^{2n})`.
    pub fn bracket_nomes(&self) -> Result<NomeSet> {
        NomeSet::new(vec![self.q(), self.x2n()])
    }
}

/// Truncated multi-nome product `(z; p₁, …, p_m)` with a certified bound on
/// the neglected log-tail.
///
/// The truncation box `[0,d₁) × ⋯ × [0,d_m)` is sized per nome so that the
/// sum of `|z·p₁^{k₁}⋯p_m^{k_m}|` over all *excluded* multi-indices is at
/// most `S = tol/4`; every excluded factor is then within `2|u|` of 1 in
/// log, giving `|Π_tail − 1| ≤ e^{2S} − 1 ≤ tol` (relative).
///
/// # Errors
///
/// `NonConvergent` when some required depth exceeds `ctrl.product_depth`.
pub fn multi_q_product(z: C64, nomes: &NomeSet, ctrl: &TruncationControl) -> Result<C64> {
    ctrl.validate()?;
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(RmxError::Domain("product: non-finite argument".to_string()));
    }
    let zn = z.norm();
    if zn == 0.0 {
        return Ok(cx(1.0, 0.0)); // every factor is exactly 1
    }
    let ps = nomes.nomes();
    let m = ps.len();

    // Depth d_i per nome: the excluded-tail geometric estimate
    //   |z|·|p_i|^{d_i}/(1−|p_i|) · Π_{j≠i} 1/(1−|p_j|)  ≤  tol/(4m),
    // plus the requirement |z|·|p_i|^{d_i} ≤ 1/2 so each neglected factor
    // stays in the log-linear regime.
    let mut depths = Vec::with_capacity(m);
    for (idx, p) in ps.iter().enumerate() {
        let pn = p.norm();
        if pn == 0.0 {
            depths.push(1usize); // only k = 0 contributes
            continue;
        }
        let others: f64 = ps
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != idx)
            .map(|(_, pj)| 1.0 / (1.0 - pj.norm()))
            .product();
        let budget = ctrl.tol / (4.0 * m as f64);
        let target = (budget * (1.0 - pn) / (others * zn)).min(0.5 / zn);
        let d = if target >= 1.0 {
            1
        } else {
            (target.ln() / pn.ln()).ceil() as usize + 1
        };
        let d = d.max(1);
        if d > ctrl.product_depth {
            return Err(RmxError::NonConvergent(format!(
                "product: nome |p_{idx}| = {pn:.6} needs depth {d} > cap {}",
                ctrl.product_depth
            )));
        }
        depths.push(d);
    }

    // Odometer over the truncation box.
    let mut k = vec![0usize; m];
    let mut acc = cx(1.0, 0.0);
    loop {
        let mut monomial = z;
        for (i, &ki) in k.iter().enumerate() {
            monomial *= ps[i].powu(ki as u32);
        }
        acc *= cx(1.0, 0.0) - monomial;
        // advance the odometer; finish after the last multi-index
        let mut slot = 0;
        loop {
            k[slot] += 1;
            if k[slot] < depths[slot] {
                break;
            }
            k[slot] = 0;
            slot += 1;
            if slot == m {
                return Ok(acc);
            }
        }
    }
}

/// The curly bracket `{u} = (u; e^{2iπτ}, x^{2n})`.
pub fn curly_brace(u: C64, params: &ScalarParams, ctrl: &TruncationControl) -> Result<C64> {
    multi_q_product(u, &params.bracket_nomes()?, ctrl)
}

/// The dressing ratio
/// `g1(v) = {x^{2v}x²}{x^{2v}x^{2n+2ξ−2}} / ({x^{2v}x^{2n}}{x^{2v}x^{2ξ}})`
/// with `x^{2v} = e^{2πi·w·v}` (principal determination).
///
/// # Errors
///
/// `Pole` on a vanishing denominator bracket.
pub fn g1_factor(v: C64, params: &ScalarParams, ctrl: &TruncationControl) -> Result<C64> {
    let two_pi_i_w = cx(0.0, 2.0 * PI) * params.w;
    let xv = (two_pi_i_w * v).exp();
    let nf = params.n as f64;
    let pow = |s: f64| (two_pi_i_w * s).exp(); // x^{2s} for real s
    let num = multi_q_product(xv * pow(1.0), &params.bracket_nomes()?, ctrl)?
        * multi_q_product(xv * pow(nf + params.xi - 1.0), &params.bracket_nomes()?, ctrl)?;
    let den = multi_q_product(xv * pow(nf), &params.bracket_nomes()?, ctrl)?
        * multi_q_product(xv * pow(params.xi), &params.bracket_nomes()?, ctrl)?;
    if den.norm() < DEFAULT_POLE_FLOOR * (1.0 + num.norm()) {
        return Err(RmxError::Pole(format!(
            "g1: denominator bracket vanishes at v = {v}"
        )));
    }
    Ok(num / den)
}

/// The scalar prefactor of the dressed R-matrix,
/// `prefactor(v) = exp{2πi·w·v·(1/n − 1)} · g1(v)/g1(−v)`.
///
/// # Errors
///
/// `Pole` when `g1(−v)` vanishes (or a bracket inside either `g1` does).
pub fn scalar_prefactor(v: C64, params: &ScalarParams, ctrl: &TruncationControl) -> Result<C64> {
    let g_plus = g1_factor(v, params, ctrl)?;
    let g_minus = g1_factor(-v, params, ctrl)?;
    if g_minus.norm() < DEFAULT_POLE_FLOOR * (1.0 + g_plus.norm()) {
        return Err(RmxError::Pole(format!(
            "prefactor: g1(−v) vanishes at v = {v}"
        )));
    }
    let nf = params.n as f64;
    let power = (cx(0.0, 2.0 * PI) * params.w * v * (1.0 / nf - 1.0)).exp();
    Ok(power * g_plus / g_minus)
}

// ---------------------------------------------------------------------------
// κ(β) quadrature
// ---------------------------------------------------------------------------

/// `κ(β)` for the parameter tuple; delegates to [`kappa_beta_parts`].
pub fn kappa_beta(params: &ScalarParams, quad_tol: f64) -> Result<C64> {
    kappa_beta_parts(params.n, params.xi, params.hbar, params.beta, quad_tol)
}

/// `κ(β) = exp{+2i·I}` with
/// `I = ∫₀^∞ sh((n−1)ℏt)·sh((ξ−1)ℏt)·sin(2βt) / (sh(ℏξt)·sh(nℏt)·t) dt`,
/// evaluated by adaptive Gauss–Kronrod (G7, K15) quadrature on `(0, T]`,
/// `T = ln(10/quad_tol) / (2ℏ·min(1,ξ))`, which puts the neglected tail
/// below `quad_tol/10` by the integrand's `e^{−2ℏ·min(1,ξ)·t}` decay.
///
/// `β = 0` and `ξ = 1` give `κ = 1` exactly by structure: every integrand
/// sample is exactly `0.0`, so the accumulated integral is `0.0` and
/// `exp(0) = 1` without rounding.
///
/// # Errors
///
/// `Domain` on invalid scalars; `NonConvergent` when panel refinement
/// cannot reach `quad_tol`.
pub fn kappa_beta_parts(n: u32, xi: f64, hbar: f64, beta: f64, quad_tol: f64) -> Result<C64> {
    if n < 2 {
        return Err(RmxError::Domain(format!("kappa: n must be >= 2, got {n}")));
    }
    if !(xi.is_finite() && xi > 0.0) || !(hbar.is_finite() && hbar > 0.0) || !beta.is_finite() {
        return Err(RmxError::Domain(
            "kappa: xi and hbar must be positive and beta finite".to_string(),
        ));
    }
    if !(quad_tol.is_finite() && quad_tol > 0.0) {
        return Err(RmxError::Domain(format!(
            "kappa: quad_tol must be positive, got {quad_tol}"
        )));
    }
    let integral = adaptive_gk15(
        kappa_integrand(n, xi, hbar, beta),
        kappa_upper_limit(xi, hbar, quad_tol),
        quad_tol,
    )?;
    Ok((cx(0.0, 2.0) * integral).exp())
}

/// Finite upper limit making the neglected tail ≤ `quad_tol/10`.
fn kappa_upper_limit(xi: f64, hbar: f64, quad_tol: f64) -> f64 {
    let rate = 2.0 * hbar * xi.min(1.0);
    ((10.0 / quad_tol).ln() / rate).max(5.0)
}

/// The κ integrand in overflow-safe exponential form.
///
/// Each `sh(x) = sign(x)·e^{|x|}·(1 − e^{−2|x|})/2`, so the hyperbolic
/// ratio becomes `sign·exp{(|a|+|b|−c−d)}·Π(1 − e^{−2|·|})` with a total
/// exponent `−2ℏ·min(1,ξ)·t < 0` — no intermediate overflow for any
/// parameter size.  Below `t = 1e−6` the removable singularity is replaced
/// by its limit `2β(n−1)(ξ−1)/(nξ)`.
fn kappa_integrand(n: u32, xi: f64, hbar: f64, beta: f64) -> impl Fn(f64) -> f64 {
    let nf = n as f64;
    let limit0 = 2.0 * beta * (nf - 1.0) * (xi - 1.0) / (nf * xi);
    move |t: f64| {
        if t < 1e-6 {
            return limit0;
        }
        let a = (nf - 1.0) * hbar * t; // > 0
        let b = (xi - 1.0) * hbar * t; // sign of (ξ−1)
        let c = hbar * xi * t; // > 0
        let d = nf * hbar * t; // > 0
        let one_m = |x: f64| -(-2.0 * x.abs()).exp_m1(); // 1 − e^{−2|x|}
        let exponent = a.abs() + b.abs() - c - d; // ≤ −2ℏ·min(1,ξ)·t
        let ratio = b.signum() * exponent.exp() * one_m(a) * one_m(b) / (one_m(c) * one_m(d));
        ratio * (2.0 * beta * t).sin() / t
    }
}

// 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule
// (positive half; the rule is symmetric and the last node is the center).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One G7/K15 panel: returns `(K15 value, |K15 − G7| estimate)`.
fn gk15_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut k15 = 0.0;
    let mut g7 = 0.0;
    for (idx, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let contribution = if x == 0.0 {
            f(center)
        } else {
            f(center - half * x) + f(center + half * x)
        };
        k15 += wk * contribution;
        if idx % 2 == 1 {
            g7 += WG[idx / 2] * contribution;
        }
    }
    (k15 * half, (k15 - g7).abs() * half)
}

/// Adaptive bisection driver on `(0, T]` with error allocation
/// proportional to panel length.
fn adaptive_gk15(f: impl Fn(f64) -> f64, upper: f64, tol: f64) -> Result<f64> {
    const MAX_DEPTH: u32 = 48;
    const MAX_PANELS: usize = 200_000;
    // seed panels fine enough to see the integrand's oscillation scale
    let initial = 16usize;
    let mut stack: Vec<(f64, f64, u32)> = (0..initial)
        .map(|idx| {
            let a = upper * idx as f64 / initial as f64;
            let b = upper * (idx + 1) as f64 / initial as f64;
            (a, b, 0)
        })
        .collect();
    let mut total = 0.0f64;
    let mut processed = 0usize;
    while let Some((a, b, depth)) = stack.pop() {
        processed += 1;
        if processed > MAX_PANELS {
            return Err(RmxError::NonConvergent(
                "quadrature: panel budget exhausted".to_string(),
            ));
        }
        let (value, err) = gk15_panel(&f, a, b);
        if err <= tol * (b - a) / upper {
            total += value;
        } else if depth >= MAX_DEPTH {
            return Err(RmxError::NonConvergent(format!(
                "quadrature: panel [{a}, {b}] error {err:e} above budget at max depth"
            )));
        } else {
            let mid = 0.5 * (a + b);
            stack.push((a, mid, depth + 1));
            stack.push((mid, b, depth + 1));
        }
    }
    Ok(total)
}
