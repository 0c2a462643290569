//! Trigonometric degenerations of the elliptic R-matrix: the scaling-limit
//! matrix `R^DY`, the ordinary-limit matrix `R^Q`, the `n = 2` reference
//! matrices, and the convergence-path samplers the checks are built on.
//!
//! Both degenerate matrices live on real spectral parameter `β` with
//! coupling `ξ` and scale `ℏ`, through the reduced combinations
//!
//! ```text
//! z_q = iβ/(ℏξ),   w_q = 1/ξ.
//! ```
//!
//! `R^DY(β)` is `κ(β)` times the charge-conserving matrix with entries
//! (residues `d = (j−i) mod n`, `a = (k−i) mod n`, `s = (l−i) mod n`)
//!
//! ```text
//! ±   sin(π/ξ) · sin(π z_q) · sin(π(z_q/n + 1/(nξ) + d/n))
//!   / [ n · sin(π(z_q + 1/ξ)) · sin(π(1/(nξ) + a/n)) · sin(π(z_q/n + s/n)) ],
//! ```
//!
//! the sign being `−1` exactly when `a + s − d = n` (charge conservation
//! forces `a + s − d ∈ {0, n}`).  `R^Q(β)` is `κ(β)` times the matrix with
//! unit diagonal `(ii,ii)`, transmission entries
//! `sin(π z_q)/sin(π(z_q+w_q)) · e^{2iπ(d/n − 1/2) w_q}` at `(ij,ij)`, and
//! exchange entries `sin(π w_q)/sin(π(z_q+w_q)) · e^{2iπ(e/n − 1/2) z_q}`
//! at `(ij,ji)` with `e = (i−j) mod n`.
//!
//! `R^DY` arises from the bare elliptic matrix along the coupled-modulus
//! scaling path `(z, w, τ) = (iβw/ℏ, w, ξw)`, `w → 0` on the upper
//! imaginary axis; `R^Q` arises along the ordinary path
//! `(z, w, τ) = (z_q, w_q, τ)`, `Im τ → ∞`.  The samplers below expose one
//! point of each path so convergence tables can measure the approach.

use crate::cnum::{cx, C64};
use crate::error::{Result, RmxError};
use crate::matrix;
use crate::qproducts::kappa_beta_parts;
use crate::theta_kernel::{sigma_alpha, ModularPoint, TruncationControl};
use crate::znrmatrix::{sbar_sum, TensorMatrix};

/// Quadrature tolerance used for `κ(β)` when dressing the degenerate
/// matrices; well below every verification tolerance that consumes them.
pub const DEFAULT_QUAD_TOL: f64 = 1e-11;

/// `|sin(π z_q/n)|` below this triggers evaluation by symmetric averaging
/// across the removable `β = 0` singularity of the `R^DY` entry formula.
const REG_TRIGGER: f64 = 1e-6;
/// Half-width of the symmetric average; the averaged value differs from
/// the limit by `O(ε²) ≈ 1e-14`.
const REG_EPSILON: f64 = 1e-7;
/// Relative floor below which a trigonometric denominator is a pole.
const TRIG_POLE_FLOOR: f64 = 1e-12;

/// Parameter tuple of the degenerate matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateParams {
    /// Rank parameter, `n ≥ 2`.
    pub n: u32,
    /// Real spectral parameter.
    pub beta: f64,
    /// Coupling `ξ > 0`.
    pub xi: f64,
    /// Scale `ℏ > 0`.
    pub hbar: f64,
    /// Multiply by the scalar phase `κ(β)`; `false` gives the stripped
    /// matrix, the direct limit of the bare elliptic one.
    pub include_kappa: bool,
}

impl DegenerateParams {
    /// # Errors
    ///
    /// `Domain` on `n < 2`, non-positive `ξ` or `ℏ`, or non-finite `β`.
    pub fn new(n: u32, beta: f64, xi: f64, hbar: f64, include_kappa: bool) -> Result<Self> {
        if n < 2 {
            return Err(RmxError::Domain(format!(
                "degenerate params: n must be >= 2, got {n}"
            )));
        }
        if !(xi.is_finite() && xi > 0.0) {
            return Err(RmxError::Domain(format!(
                "degenerate params: xi must be positive, got {xi}"
            )));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(RmxError::Domain(format!(
                "degenerate params: hbar must be positive, got {hbar}"
            )));
        }
        if !beta.is_finite() {
            return Err(RmxError::Domain("degenerate params: beta must be finite".to_string()));
        }
        Ok(Self { n, beta, xi, hbar, include_kappa })
    }

    /// Copy with the `κ` dressing switched off.
    pub fn stripped(&self) -> Self {
        Self { include_kappa: false, ..*self }
    }

    /// `z_q = iβ/(ℏξ)`.
    pub fn zq(&self) -> C64 {
        cx(0.0, self.beta / (self.hbar * self.xi))
    }
}

fn kappa_dressing(p: &DegenerateParams) -> Result<C64> {
    if p.include_kappa {
        kappa_beta_parts(p.n, p.xi, p.hbar, p.beta, DEFAULT_QUAD_TOL)
    } else {
        Ok(cx(1.0, 0.0))
    }
}

/// One evaluation of the stripped `R^DY` entry formula; no averaging.
fn r_dy_stripped_raw(n: u32, beta: f64, xi: f64, hbar: f64) -> Result<TensorMatrix> {
    let nd = n as usize;
    let nf = n as f64;
    let zq = cx(0.0, beta / (hbar * xi));
    let pi = std::f64::consts::PI;
    let sin_pi = |u: C64| (u * pi).sin();
    let num_xi = sin_pi(cx(1.0 / xi, 0.0));
    let num_zq = sin_pi(zq);
    let den_shift = sin_pi(zq + 1.0 / xi);
    let scale = num_xi.norm().max(num_zq.norm()).max(1.0);
    if den_shift.norm() < TRIG_POLE_FLOOR * scale {
        return Err(RmxError::Pole(format!(
            "r_dy: sin(pi (z_q + 1/xi)) vanishes at beta = {beta}, xi = {xi}"
        )));
    }
    let mut entries = matrix::zeros(nd * nd);
    for k in 0..nd {
        for l in 0..nd {
            for i in 0..nd {
                for j in 0..nd {
                    if (i + j) % nd != (k + l) % nd {
                        continue;
                    }
                    let d = (j + nd - i) % nd;
                    let a = (k + nd - i) % nd;
                    let s = (l + nd - i) % nd;
                    let sign = if a + s == d { 1.0 } else { -1.0 }; // a+s−d ∈ {0, n}
                    let num_d = sin_pi(zq / nf + 1.0 / (nf * xi) + d as f64 / nf);
                    let den_a = sin_pi(cx(1.0 / (nf * xi) + a as f64 / nf, 0.0));
                    let den_s = sin_pi(zq / nf + s as f64 / nf);
                    if den_a.norm() < TRIG_POLE_FLOOR * scale
                        || den_s.norm() < TRIG_POLE_FLOOR * scale
                    {
                        return Err(RmxError::Pole(format!(
                            "r_dy: entry denominator vanishes at beta = {beta}, xi = {xi}"
                        )));
                    }
                    entries[[k * nd + l, i * nd + j]] =
                        sign * num_xi * num_zq * num_d / (nf * den_shift * den_a * den_s);
                }
            }
        }
    }
    TensorMatrix::new(n, entries, false)
}

/// The scaling-limit matrix `R^DY(β)` (see the module docs).
///
/// Near `β = 0` the entry formula is a removable `0/0` on the `s = 0`
/// sector; when `|sin(π z_q/n)| < 1e-6` the matrix is computed as the
/// symmetric average of the raw formula at `β ± 1e-7` and flagged
/// `regularized`.
///
/// # Errors
///
/// `Domain` from parameter validation; `Pole` on genuine denominator
/// zeros (e.g. `1/(nξ) + a/n ∈ Z`).
pub fn r_dy(p: &DegenerateParams) -> Result<TensorMatrix> {
    DegenerateParams::new(p.n, p.beta, p.xi, p.hbar, p.include_kappa)?;
    let nf = p.n as f64;
    let probe = (p.zq() / nf * std::f64::consts::PI).sin();
    let stripped = if probe.norm() < REG_TRIGGER {
        let plus = r_dy_stripped_raw(p.n, p.beta + REG_EPSILON, p.xi, p.hbar)?;
        let minus = r_dy_stripped_raw(p.n, p.beta - REG_EPSILON, p.xi, p.hbar)?;
        let averaged = (plus.entries() + minus.entries()).mapv(|e| e * 0.5);
        TensorMatrix::new(p.n, averaged, true)?
    } else {
        r_dy_stripped_raw(p.n, p.beta, p.xi, p.hbar)?
    };
    Ok(stripped.scaled(kappa_dressing(p)?))
}

/// The ordinary-limit matrix `R^Q(β)` (see the module docs).
///
/// # Errors
///
/// `Domain` from parameter validation; `Pole` when `sin(π(z_q + w_q))`
/// vanishes.
pub fn r_q(p: &DegenerateParams) -> Result<TensorMatrix> {
    DegenerateParams::new(p.n, p.beta, p.xi, p.hbar, p.include_kappa)?;
    let nd = p.n as usize;
    let nf = p.n as f64;
    let pi = std::f64::consts::PI;
    let zq = p.zq();
    let wq = 1.0 / p.xi;
    let sin_z = (zq * pi).sin();
    let sin_w = cx((pi * wq).sin(), 0.0);
    let den = ((zq + wq) * pi).sin();
    if den.norm() < TRIG_POLE_FLOOR * (1.0 + sin_z.norm().max(sin_w.norm())) {
        return Err(RmxError::Pole(format!(
            "r_q: sin(pi (z_q + w_q)) vanishes at beta = {}, xi = {}",
            p.beta, p.xi
        )));
    }
    let mut entries = matrix::zeros(nd * nd);
    for i in 0..nd {
        for j in 0..nd {
            if i == j {
                entries[[i * nd + i, i * nd + i]] = cx(1.0, 0.0);
                continue;
            }
            let d = (j + nd - i) % nd;
            let e = (i + nd - j) % nd;
            let transmit = (cx(0.0, 2.0 * pi) * (d as f64 / nf - 0.5) * wq).exp();
            entries[[i * nd + j, i * nd + j]] = sin_z / den * transmit;
            let exchange = (cx(0.0, 2.0 * pi) * (e as f64 / nf - 0.5) * zq).exp();
            entries[[i * nd + j, j * nd + i]] = sin_w / den * exchange;
        }
    }
    Ok(TensorMatrix::new(p.n, entries, false)?.scaled(kappa_dressing(p)?))
}

/// The two classical `n = 2` reference matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    /// Symmetric eight-vertex form of the scaling-limit matrix.
    EightVertex,
    /// Symmetric six-vertex form of the ordinary-limit matrix.
    SixVertex,
}

impl ReferenceKind {
    /// Stable identifier (`eight_vertex` / `six_vertex`).
    pub fn name(&self) -> &'static str {
        match self {
            ReferenceKind::EightVertex => "eight_vertex",
            ReferenceKind::SixVertex => "six_vertex",
        }
    }
}

impl std::str::FromStr for ReferenceKind {
    type Err = RmxError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eight_vertex" => Ok(ReferenceKind::EightVertex),
            "six_vertex" => Ok(ReferenceKind::SixVertex),
            other => Err(RmxError::Domain(format!(
                "unknown reference kind `{other}` (expected eight_vertex or six_vertex)"
            ))),
        }
    }
}

/// Independent transcription of the `n = 2` reference matrices, written
/// directly in the classical Boltzmann-weight form.
///
/// Eight-vertex, with `A = π·iβ/(2ℏξ)` and `B = π/(2ξ)`:
///
/// ```text
/// ⎛ cosB·cosA/cos(A+B)                    −sinB·sinA/cos(A+B) ⎞
/// ⎜        cosB·sinA/sin(A+B)  sinB·cosA/sin(A+B)             ⎟
/// ⎜        sinB·cosA/sin(A+B)  cosB·sinA/sin(A+B)             ⎟
/// ⎝ −sinB·sinA/cos(A+B)                    cosB·cosA/cos(A+B) ⎠
/// ```
///
/// Six-vertex, with `b = sin(π z_q)/sin(π(z_q+w_q))` and
/// `c = sin(π w_q)/sin(π(z_q+w_q))`: `diag-block [[1],[b,c],[c,b],[1]]`.
/// Both are multiplied by `κ(β)` when `include_kappa` is set.
///
/// # Errors
///
/// `Domain` when `p.n != 2`; `Pole` on vanishing denominators.
pub fn reference_n2(kind: ReferenceKind, p: &DegenerateParams) -> Result<TensorMatrix> {
    DegenerateParams::new(p.n, p.beta, p.xi, p.hbar, p.include_kappa)?;
    if p.n != 2 {
        return Err(RmxError::Domain(format!(
            "reference matrices are defined for n = 2 only, got n = {}",
            p.n
        )));
    }
    let pi = std::f64::consts::PI;
    let mut entries = matrix::zeros(4);
    match kind {
        ReferenceKind::EightVertex => {
            let a = cx(0.0, pi * p.beta / (2.0 * p.hbar * p.xi));
            let b = cx(pi / (2.0 * p.xi), 0.0);
            let cos_sum = (a + b).cos();
            let sin_sum = (a + b).sin();
            if cos_sum.norm() < TRIG_POLE_FLOOR || sin_sum.norm() < TRIG_POLE_FLOOR {
                return Err(RmxError::Pole(format!(
                    "eight-vertex: sin or cos of A+B vanishes at beta = {}, xi = {}",
                    p.beta, p.xi
                )));
            }
            entries[[0, 0]] = b.cos() * a.cos() / cos_sum;
            entries[[3, 3]] = entries[[0, 0]];
            entries[[0, 3]] = -b.sin() * a.sin() / cos_sum;
            entries[[3, 0]] = entries[[0, 3]];
            entries[[1, 1]] = b.cos() * a.sin() / sin_sum;
            entries[[2, 2]] = entries[[1, 1]];
            entries[[1, 2]] = b.sin() * a.cos() / sin_sum;
            entries[[2, 1]] = entries[[1, 2]];
        }
        ReferenceKind::SixVertex => {
            let zq = p.zq();
            let wq = 1.0 / p.xi;
            let den = ((zq + wq) * pi).sin();
            if den.norm() < TRIG_POLE_FLOOR {
                return Err(RmxError::Pole(format!(
                    "six-vertex: sin(pi (z_q + w_q)) vanishes at beta = {}, xi = {}",
                    p.beta, p.xi
                )));
            }
            let b = (zq * pi).sin() / den;
            let c = cx((pi * wq).sin(), 0.0) / den;
            entries[[0, 0]] = cx(1.0, 0.0);
            entries[[3, 3]] = cx(1.0, 0.0);
            entries[[1, 1]] = b;
            entries[[2, 2]] = b;
            entries[[1, 2]] = c;
            entries[[2, 1]] = c;
        }
    }
    Ok(TensorMatrix::new(2, entries, false)?.scaled(kappa_dressing(p)?))
}

/// One point of the scaling path: the bare elliptic matrix at
/// `(z, w, τ) = (iβw/ℏ, w, ξw)`; its `w → 0` limit is the stripped `R^DY`.
///
/// # Errors
///
/// `Domain` unless `Im(ξw) > 0`; elliptic-side errors propagated.
pub fn scaling_path_sample(
    p: &DegenerateParams,
    w: C64,
    ctrl: &TruncationControl,
) -> Result<(C64, TensorMatrix)> {
    DegenerateParams::new(p.n, p.beta, p.xi, p.hbar, p.include_kappa)?;
    let tau = p.xi * w;
    if !w.re.is_finite() || !w.im.is_finite() || tau.im <= 0.0 {
        return Err(RmxError::Domain(format!(
            "scaling path: Im(xi w) must be positive, got w = {w}"
        )));
    }
    let z = cx(0.0, p.beta / p.hbar) * w;
    Ok((w, sbar_sum(z, w, tau, p.n, ctrl)?))
}

/// One point of the ordinary path: the bare elliptic matrix at
/// `(z, w) = (z_q, 1/ξ)` and the given `τ`; its `Im τ → ∞` limit is the
/// stripped `R^Q`.
///
/// # Errors
///
/// `Domain` unless `Im τ > 0`; elliptic-side errors propagated.
pub fn ordinary_path_sample(
    p: &DegenerateParams,
    tau: C64,
    ctrl: &TruncationControl,
) -> Result<(C64, TensorMatrix)> {
    DegenerateParams::new(p.n, p.beta, p.xi, p.hbar, p.include_kappa)?;
    if !tau.re.is_finite() || !tau.im.is_finite() || tau.im <= 0.0 {
        return Err(RmxError::Domain(format!(
            "ordinary path: Im(tau) must be positive, got {tau}"
        )));
    }
    let w = cx(1.0 / p.xi, 0.0);
    Ok((tau, sbar_sum(p.zq(), w, tau, p.n, ctrl)?))
}

/// Residual of the sine product identity
///
/// ```text
/// Π_{j=1}^{n-1} sin(x + jπ/n)/sin(jπ/n) = sin(n x)/(n sin x),
/// ```
///
/// the trigonometric backbone of the degenerate entry formulas.
///
/// # Errors
///
/// `Domain` for `n < 2`; `Pole` when `sin x` vanishes.
pub fn sine_identity_residual(x: C64, n: u32) -> Result<f64> {
    if n < 2 {
        return Err(RmxError::Domain(format!("sine identity: n must be >= 2, got {n}")));
    }
    let nf = n as f64;
    let pi = std::f64::consts::PI;
    let sx = x.sin();
    let snx = (x * nf).sin();
    if sx.norm() < TRIG_POLE_FLOOR * (1.0 + snx.norm()) {
        return Err(RmxError::Pole(format!("sine identity: sin(x) vanishes at x = {x}")));
    }
    let mut lhs = cx(1.0, 0.0);
    for j in 1..n {
        lhs *= (x + pi * j as f64 / nf).sin() / (pi * j as f64 / nf).sin();
    }
    let rhs = snx / (nf * sx);
    Ok((lhs - rhs).norm())
}

/// Residual of the small-`w` theta-ratio asymptotics along the scaling
/// path: with characteristics offsets `a`, `b` (e.g. `m/n`),
///
/// ```text
/// θ[1/2+a; 1/2](iβw/ℏ, nξw) / θ[1/2+b; 1/2](iβw/ℏ, nξw)
///   →  e^{iπ(a−b)} · sin(π(iβ/(nℏξ) + a)) / sin(π(iβ/(nℏξ) + b)),
/// ```
///
/// the mechanism by which the elliptic entry formula degenerates to the
/// `R^DY` sines.  Returns `|ratio − limit|` at the given `w`.
///
/// # Errors
///
/// `Domain` unless `Im(ξw) > 0` and the offsets are multiples of `1/n` in
/// `[0, 1)`; `Pole` when the denominator theta or sine vanishes.
pub fn theta_ratio_asymptotic_residual(
    a_num: i64,
    b_num: i64,
    p: &DegenerateParams,
    w: C64,
    ctrl: &TruncationControl,
) -> Result<f64> {
    DegenerateParams::new(p.n, p.beta, p.xi, p.hbar, p.include_kappa)?;
    let nf = p.n as f64;
    let big_t = nf * p.xi * w;
    if !w.re.is_finite() || !w.im.is_finite() || big_t.im <= 0.0 {
        return Err(RmxError::Domain(format!(
            "asymptotics: Im(n xi w) must be positive, got w = {w}"
        )));
    }
    if !(0..p.n as i64).contains(&a_num) || !(0..p.n as i64).contains(&b_num) {
        return Err(RmxError::Domain(format!(
            "asymptotics: characteristic numerators must lie in [0, n), got {a_num}, {b_num}"
        )));
    }
    let z = cx(0.0, p.beta / p.hbar) * w;
    let pt = ModularPoint::new(z, big_t)?;
    let top = sigma_alpha((a_num, 0), p.n, &pt, ctrl)?;
    let bottom = sigma_alpha((b_num, 0), p.n, &pt, ctrl)?;
    if bottom.norm() < TRIG_POLE_FLOOR * (1.0 + top.norm()) {
        return Err(RmxError::Pole(format!(
            "asymptotics: denominator theta vanishes at w = {w}"
        )));
    }
    let ratio = top / bottom;
    let pi = std::f64::consts::PI;
    let zeta = cx(0.0, p.beta / (nf * p.hbar * p.xi));
    let a_off = a_num as f64 / nf;
    let b_off = b_num as f64 / nf;
    let sin_b = ((zeta + b_off) * pi).sin();
    if sin_b.norm() < TRIG_POLE_FLOOR {
        return Err(RmxError::Pole(format!(
            "asymptotics: limit denominator sine vanishes at beta = {}",
            p.beta
        )));
    }
    let limit = (cx(0.0, pi) * (a_off - b_off)).exp() * ((zeta + a_off) * pi).sin() / sin_b;
    Ok((ratio - limit).norm())
}
