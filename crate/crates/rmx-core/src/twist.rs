//! The discrete Fourier twist connecting the two trigonometric
//! degenerations, and the modular-transformation residual of the bare
//! elliptic matrix.
//!
//! With `M_{jk} = ω^{jk}` (`ω = e^{2iπ/n}`, 0-based indices) the twist
//! operators on the tensor square are
//!
//! ```text
//! F₁₂ = (M ⊗ M)·P,    F₂₁ = P·F₁₂·P,
//! ```
//!
//! and the scaling-limit matrix is the twisted ordinary-limit matrix:
//!
//! ```text
//! R^DY(β) = F₂₁ · R^Q(β) · F₁₂^{-1}
//! ```
//!
//! (κ-stripped or κ-dressed alike, the dressing being a scalar).  `M`
//! conjugates the Weyl pair as `M g M^{-1} = h^{-1}`, `M h M^{-1} = g`,
//! which is the finite-dimensional root of the twist.  The same `M`
//! controls the modular behaviour of the bare elliptic matrix:
//!
//! ```text
//! (M⊗M)·S̄(z/τ, w/τ, −1/τ)·(M⊗M)^{-1}
//!     = exp{2iπ·zw(1−n)/(nτ)} · P·S̄(z, w, τ)·P.
//! ```

use crate::cnum::{cx, C64};
use crate::error::{Result, RmxError};
use crate::matrix::{self, CMatrix};
use crate::theta_kernel::TruncationControl;
use crate::trig_limits::{r_dy, r_q, DegenerateParams};
use crate::znrmatrix::{permutation_op, sbar_sum, TensorMatrix};

/// The discrete Fourier matrix `M_{jk} = ω^{jk}` (unnormalized; its
/// inverse is `conj(M)/n`).
///
/// # Errors
///
/// `Domain` for `n < 2`.
pub fn m_matrix(n: u32) -> Result<CMatrix> {
    if n < 2 {
        return Err(RmxError::Domain(format!("m matrix: n must be >= 2, got {n}")));
    }
    let nd = n as usize;
    let mut m = matrix::zeros(nd);
    for j in 0..nd {
        for k in 0..nd {
            let e = ((j * k) % nd) as f64;
            m[[j, k]] = (cx(0.0, 2.0 * std::f64::consts::PI) * (e / n as f64)).exp();
        }
    }
    Ok(m)
}

/// The twist operators built from a one-site matrix `M`.
#[derive(Debug, Clone)]
pub struct TwistData {
    /// Rank parameter.
    pub n: u32,
    /// The one-site matrix the twist is generated by.
    pub m: CMatrix,
    /// `F₁₂ = (M ⊗ M)·P`.
    pub f12: CMatrix,
    /// `F₂₁ = P·F₁₂·P`.
    pub f21: CMatrix,
    /// `F₁₂^{-1} = P·(M^{-1} ⊗ M^{-1})`.
    pub f12_inv: CMatrix,
}

/// Twist data for the standard Fourier matrix, using the closed inverse
/// `M^{-1} = conj(M)/n`.
///
/// # Errors
///
/// `Domain` for `n < 2`.
pub fn twist_f(n: u32) -> Result<TwistData> {
    let m = m_matrix(n)?;
    let m_inv = m.mapv(|e| e.conj() / n as f64);
    assemble_twist(n, m, m_inv)
}

/// Twist data for an arbitrary invertible one-site matrix (the twisted
/// conjugation is invariant under rescaling `M → c·M`).
///
/// # Errors
///
/// `Domain` for `n < 2` or a singular `M`; `Dimension` on shape mismatch.
pub fn twist_from_m(m: &CMatrix, n: u32) -> Result<TwistData> {
    if n < 2 {
        return Err(RmxError::Domain(format!("twist: n must be >= 2, got {n}")));
    }
    if m.nrows() != n as usize || m.ncols() != n as usize {
        return Err(RmxError::Dimension(format!(
            "twist: expected {n}x{n} one-site matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let m_inv = matrix::invert(m)?;
    assemble_twist(n, m.clone(), m_inv)
}

fn assemble_twist(n: u32, m: CMatrix, m_inv: CMatrix) -> Result<TwistData> {
    let p = permutation_op(n);
    let mm = matrix::kron(&m, &m);
    let f12 = mm.dot(p.entries());
    let f21 = p.entries().dot(&f12).dot(p.entries());
    let f12_inv = p.entries().dot(&matrix::kron(&m_inv, &m_inv));
    Ok(TwistData { n, m, f12, f21, f12_inv })
}

/// `F₂₁ · R · F₁₂^{-1}`.  The `regularized` flag is carried over; the
/// charge-conservation flag is re-derived from the numerical result.
///
/// # Errors
///
/// `Dimension` when `R` does not match the twist's rank.
pub fn twisted_conjugate(td: &TwistData, r: &TensorMatrix) -> Result<TensorMatrix> {
    if r.n() != td.n {
        return Err(RmxError::Dimension(format!(
            "twist: rank mismatch, twist has n = {}, matrix has n = {}",
            td.n,
            r.n()
        )));
    }
    let entries = td.f21.dot(r.entries()).dot(&td.f12_inv);
    TensorMatrix::new(td.n, entries, r.regularized())
}

/// Residual `max |R^DY(β) − F₂₁·R^Q(β)·F₁₂^{-1}|` for the κ-stripped
/// matrices.
///
/// # Errors
///
/// Parameter and pole errors from the degenerate builders.
pub fn twist_residual(p: &DegenerateParams) -> Result<f64> {
    twist_residual_inner(&p.stripped())
}

/// Same residual with both sides carrying the `κ(β)` dressing; the
/// dressing is a scalar, so this should agree with [`twist_residual`] to
/// roundoff.
///
/// # Errors
///
/// Parameter, pole, and quadrature errors from the degenerate builders.
pub fn twist_residual_with_kappa(p: &DegenerateParams) -> Result<f64> {
    let mut dressed = *p;
    dressed.include_kappa = true;
    twist_residual_inner(&dressed)
}

fn twist_residual_inner(p: &DegenerateParams) -> Result<f64> {
    let td = twist_f(p.n)?;
    let lhs = r_dy(p)?;
    let rhs = twisted_conjugate(&td, &r_q(p)?)?;
    matrix::max_norm_diff(lhs.entries(), rhs.entries())
}

/// Residual of the modular transformation of the bare elliptic matrix
/// (see the module docs):
///
/// ```text
/// max | (M⊗M)·S̄(z/τ, w/τ, −1/τ)·(M⊗M)^{-1}
///       − e^{2iπ·zw(1−n)/(nτ)} · P·S̄(z, w, τ)·P |.
/// ```
///
/// # Errors
///
/// `Domain`/`Pole`/truncation errors from the theta evaluations on either
/// side of the transform.
pub fn mt2_residual(z: C64, w: C64, tau: C64, n: u32, ctrl: &TruncationControl) -> Result<f64> {
    let m = m_matrix(n)?;
    let mm = matrix::kron(&m, &m);
    let mm_inv = matrix::kron(&m, &m).mapv(|e| e.conj() / (n * n) as f64);
    let transformed = sbar_sum(z / tau, w / tau, -1.0 / tau, n, ctrl)?;
    let lhs = mm.dot(transformed.entries()).dot(&mm_inv);
    let nf = n as f64;
    let scalar = (cx(0.0, 2.0 * std::f64::consts::PI) * z * w * (1.0 - nf) / (nf * tau)).exp();
    let p = permutation_op(n);
    let direct = sbar_sum(z, w, tau, n, ctrl)?;
    let rhs = p
        .entries()
        .dot(direct.entries())
        .dot(p.entries())
        .mapv(|e| e * scalar);
    matrix::max_norm_diff(&lhs, &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{eye, max_norm_diff};
    use crate::znrmatrix::build_g;
    use crate::znrmatrix::build_h;

    const M_TOL: f64 = 1e-13;
    const TWIST_TOL: f64 = 1e-10;

    fn ctrl() -> TruncationControl {
        TruncationControl::default()
    }

    #[test]
    fn m_conjugates_the_weyl_pair() {
        for n in 2..=6u32 {
            let m = m_matrix(n).unwrap();
            let m_inv = m.mapv(|e| e.conj() / n as f64);
            let (h, g) = (build_h(n), build_g(n));
            let h_inv = matrix::invert(&h).unwrap();
            let r1 = max_norm_diff(&m.dot(&g).dot(&m_inv), &h_inv).unwrap();
            let r2 = max_norm_diff(&m.dot(&h).dot(&m_inv), &g).unwrap();
            assert!(r1 < M_TOL, "n = {n}: |M g M⁻¹ − h⁻¹| = {r1:.3e}");
            assert!(r2 < M_TOL, "n = {n}: |M h M⁻¹ − g| = {r2:.3e}");
        }
    }

    #[test]
    fn twist_operators_invert_cleanly() {
        for n in 2..=5u32 {
            let td = twist_f(n).unwrap();
            let product = td.f12.dot(&td.f12_inv);
            let d = max_norm_diff(&product, &eye((n * n) as usize)).unwrap();
            assert!(d < M_TOL, "n = {n}: |F₁₂ F₁₂⁻¹ − 1| = {d:.3e}");
        }
    }

    #[test]
    fn twisted_permutation_is_the_permutation() {
        // F₂₁ P F₁₂^{-1} = P F₁₂ P · P · F₁₂^{-1} = P exactly.
        for n in 2..=5u32 {
            let td = twist_f(n).unwrap();
            let p = permutation_op(n);
            let twisted = twisted_conjugate(&td, &p).unwrap();
            let d = max_norm_diff(twisted.entries(), p.entries()).unwrap();
            assert!(d < M_TOL, "n = {n}: |F₂₁ P F₁₂⁻¹ − P| = {d:.3e}");
        }
    }

    #[test]
    fn twist_is_invariant_under_rescaling_m() {
        let n = 3u32;
        let p = DegenerateParams::new(n, 0.41, 2.2, 0.9, false).unwrap();
        let rq = r_q(&p).unwrap();
        let base = twisted_conjugate(&twist_f(n).unwrap(), &rq).unwrap();
        let rescaled_m = m_matrix(n).unwrap().mapv(|e| e * cx(0.0, 2.7));
        let rescaled = twisted_conjugate(&twist_from_m(&rescaled_m, n).unwrap(), &rq).unwrap();
        let d = max_norm_diff(base.entries(), rescaled.entries()).unwrap();
        assert!(d < 1e-12, "|rescaled − base| = {d:.3e}");
    }

    #[test]
    fn twist_maps_r_q_to_r_dy() {
        for n in [2u32, 3, 4, 5] {
            let p = DegenerateParams::new(n, 0.41, 2.2, 0.9, false).unwrap();
            let d = twist_residual(&p).unwrap();
            assert!(d < TWIST_TOL, "n = {n}: twist residual {d:.3e}");
        }
        // the κ-dressed residual coincides (scalar factor on both sides)
        let p = DegenerateParams::new(3, 0.41, 2.2, 0.9, false).unwrap();
        let dressed = twist_residual_with_kappa(&p).unwrap();
        assert!(dressed < TWIST_TOL, "dressed twist residual {dressed:.3e}");
    }

    #[test]
    fn twist_residual_is_small_near_the_regularized_point() {
        let p = DegenerateParams::new(2, 1e-6, 2.2, 0.9, false).unwrap();
        let d = twist_residual(&p).unwrap();
        assert!(d < TWIST_TOL, "twist residual at beta = 1e-6: {d:.3e}");
    }

    #[test]
    fn n2_symmetry_makes_the_reversed_twist_equivalent() {
        // P R^Q P = R^Q at n = 2, so F₁₂ R^Q F₂₁^{-1} gives the same R^DY.
        let p = DegenerateParams::new(2, 0.37, 1.7, 1.1, false).unwrap();
        let td = twist_f(2).unwrap();
        let perm = permutation_op(2);
        let f21_inv = perm.entries().dot(&td.f12_inv).dot(perm.entries());
        let reversed = td.f12.dot(r_q(&p).unwrap().entries()).dot(&f21_inv);
        let d = max_norm_diff(r_dy(&p).unwrap().entries(), &reversed).unwrap();
        assert!(d < TWIST_TOL, "|R^DY − F₁₂ R^Q F₂₁⁻¹| = {d:.3e}");
    }

    #[test]
    fn mt2_residual_vanishes_at_zero_argument() {
        let (w, tau) = (cx(0.23, 0.31), cx(0.2, 1.6));
        for n in [2u32, 3] {
            let d = mt2_residual(cx(0.0, 0.0), w, tau, n, &ctrl()).unwrap();
            assert!(d < 1e-12, "n = {n}: MT2 residual at z = 0 is {d:.3e}");
        }
    }

    #[test]
    fn mt2_residual_at_generic_points() {
        let d2 = mt2_residual(cx(0.2, 0.0), cx(0.3, 0.2), cx(1.0, 2.0), 2, &ctrl()).unwrap();
        assert!(d2 < 1e-9, "n = 2: MT2 residual {d2:.3e}");
        let d3 = mt2_residual(cx(0.11, 0.04), cx(0.23, 0.31), cx(0.2, 1.6), 3, &ctrl()).unwrap();
        assert!(d3 < 1e-9, "n = 3: MT2 residual {d3:.3e}");
    }

    #[test]
    fn twist_rejects_bad_inputs() {
        assert!(m_matrix(1).is_err());
        assert!(twist_f(0).is_err());
        let td = twist_f(2).unwrap();
        let p3 = DegenerateParams::new(3, 0.3, 1.5, 1.0, false).unwrap();
        let r3 = r_q(&p3).unwrap();
        assert!(matches!(
            twisted_conjugate(&td, &r3),
            Err(RmxError::Dimension(_))
        ));
        assert!(matches!(
            twist_from_m(&matrix::zeros(3), 3),
            Err(RmxError::Domain(_))
        ));
        assert!(matches!(
            twist_from_m(&matrix::zeros(3), 2),
            Err(RmxError::Dimension(_))
        ));
    }
}
