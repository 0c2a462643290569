//! Dense complex-matrix plumbing: Kronecker products, Gauss–Jordan
//! inversion, three-site embeddings, and the partial transpose in the
//! second tensor factor.
//!
//! Matrices on `V ⊗ V` (dimension `n² × n²`) use the composite index
//! convention `row = k·n + l`, `col = i·n + j` for the entry `R^{kl}_{ij}`,
//! with `k, l, i, j ∈ {0, …, n−1}`.  Three-site embeddings into `V ⊗ V ⊗ V`
//! are built by explicit index maps rather than Kronecker-with-identity
//! shortcuts, so each slot assignment is spelled out once and tested.

use crate::cnum::C64;
use crate::error::{Result, RmxError};
use ndarray::Array2;

/// Dense complex matrix.
pub type CMatrix = Array2<C64>;

/// `d × d` zero matrix.
pub fn zeros(d: usize) -> CMatrix {
    Array2::zeros((d, d))
}

/// `d × d` identity matrix.
pub fn eye(d: usize) -> CMatrix {
    let mut m = zeros(d);
    for idx in 0..d {
        m[[idx, idx]] = C64::new(1.0, 0.0);
    }
    m
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    ndarray::linalg::kron(a, b)
}

/// Entrywise max-norm `max_{r,c} |a[r,c]|`.
pub fn max_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max-norm of the difference `a − b`; errors when shapes differ.
pub fn max_norm_diff(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(RmxError::Dimension(format!(
            "max_norm_diff: {:?} vs {:?}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// Max-norm distance of a square matrix from the identity.
pub fn identity_residual(a: &CMatrix) -> f64 {
    let d = a.nrows();
    let mut worst = 0.0f64;
    for r in 0..d {
        for c in 0..d {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((a[[r, c]] - target).norm());
        }
    }
    worst
}

// A pivot below this magnitude makes Gauss–Jordan elimination meaningless
// in double precision; the matrices inverted here (twists, small unitaries)
// are far from this regime unless genuinely singular.
const SINGULAR_PIVOT: f64 = 1e-250;

/// Matrix inverse by Gauss–Jordan elimination with partial pivoting.
///
/// # Errors
///
/// `Dimension` for non-square input, `Domain` when a pivot collapses
/// (numerically singular matrix).
pub fn invert(a: &CMatrix) -> Result<CMatrix> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(RmxError::Dimension(format!(
            "invert: non-square shape {rows}x{cols}"
        )));
    }
    let d = rows;
    let mut m = a.clone();
    let mut inv = eye(d);
    for col in 0..d {
        // partial pivot: largest remaining magnitude in this column
        let mut best = col;
        let mut best_mag = m[[col, col]].norm();
        for r in (col + 1)..d {
            let mag = m[[r, col]].norm();
            if mag > best_mag {
                best = r;
                best_mag = mag;
            }
        }
        if best_mag < SINGULAR_PIVOT {
            return Err(RmxError::Domain(
                "invert: matrix is numerically singular".to_string(),
            ));
        }
        if best != col {
            swap_rows(&mut m, col, best);
            swap_rows(&mut inv, col, best);
        }
        let pivot = m[[col, col]];
        for c in 0..d {
            m[[col, c]] /= pivot;
            inv[[col, c]] /= pivot;
        }
        for r in 0..d {
            if r == col {
                continue;
            }
            let factor = m[[r, col]];
            if factor.norm() == 0.0 {
                continue;
            }
            for c in 0..d {
                let mc = m[[col, c]];
                let ic = inv[[col, c]];
                m[[r, c]] -= factor * mc;
                inv[[r, c]] -= factor * ic;
            }
        }
    }
    Ok(inv)
}

fn swap_rows(m: &mut CMatrix, r1: usize, r2: usize) {
    let cols = m.ncols();
    for c in 0..cols {
        let tmp = m[[r1, c]];
        m[[r1, c]] = m[[r2, c]];
        m[[r2, c]] = tmp;
    }
}

/// Embed a two-site operator `r` (shape `n² × n²`) into `V ⊗ V ⊗ V` acting
/// on the slot pair `(slot_a, slot_b)` with `slot_a < slot_b < 3`, identity
/// on the remaining slot.
///
/// The embedding is an explicit index map: with output multi-index
/// `(o₀,o₁,o₂)` and input multi-index `(i₀,i₁,i₂)`,
///
/// ```text
/// E[(o₀,o₁,o₂),(i₀,i₁,i₂)] = r[(o_a·n + o_b),(i_a·n + i_b)] · δ(o_s, i_s)
/// ```
///
/// where `s` is the spectator slot.
pub fn embed_pair(r: &CMatrix, slot_a: usize, slot_b: usize, n: usize) -> Result<CMatrix> {
    if slot_a >= slot_b || slot_b > 2 {
        return Err(RmxError::Domain(format!(
            "embed_pair: slot pair ({slot_a},{slot_b}) must satisfy slot_a < slot_b <= 2"
        )));
    }
    let d2 = n * n;
    if r.dim() != (d2, d2) {
        return Err(RmxError::Dimension(format!(
            "embed_pair: expected {d2}x{d2} operator, got {:?}",
            r.dim()
        )));
    }
    let spectator = 3 - slot_a - slot_b;
    let d3 = n * n * n;
    let mut out = zeros(d3);
    for o0 in 0..n {
        for o1 in 0..n {
            for o2 in 0..n {
                let o = [o0, o1, o2];
                for i0 in 0..n {
                    for i1 in 0..n {
                        for i2 in 0..n {
                            let ic = [i0, i1, i2];
                            if o[spectator] != ic[spectator] {
                                continue;
                            }
                            let val = r[[o[slot_a] * n + o[slot_b], ic[slot_a] * n + ic[slot_b]]];
                            if val.norm() == 0.0 {
                                continue;
                            }
                            out[[(o0 * n + o1) * n + o2, (i0 * n + i1) * n + i2]] = val;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Partial transpose in the second tensor factor:
/// `(R^{t₂})^{kl}_{ij} = R^{kj}_{il}`.
pub fn partial_transpose_second(a: &CMatrix, n: usize) -> Result<CMatrix> {
    let d2 = n * n;
    if a.dim() != (d2, d2) {
        return Err(RmxError::Dimension(format!(
            "partial_transpose_second: expected {d2}x{d2}, got {:?}",
            a.dim()
        )));
    }
    let mut out = zeros(d2);
    for k in 0..n {
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[[k * n + l, i * n + j]] = a[[k * n + j, i * n + l]];
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnum::cx;

    // Double-precision identities on well-conditioned small matrices sit at
    // the 1e-14 level after a handful of eliminations.
    const TOL: f64 = 1e-12;

    fn random_matrix(d: usize, seed: u64) -> CMatrix {
        // Tiny deterministic LCG; plenty for constructing test fixtures.
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let mut m = zeros(d);
        for r in 0..d {
            for c in 0..d {
                m[[r, c]] = cx(next(), next());
            }
        }
        m
    }

    #[test]
    fn kron_matches_hand_worked_2x2() {
        let a = ndarray::array![
            [cx(1.0, 0.0), cx(2.0, 0.0)],
            [cx(3.0, 0.0), cx(4.0, 0.0)]
        ];
        let b = ndarray::array![
            [cx(0.0, 1.0), cx(0.0, 0.0)],
            [cx(0.0, 0.0), cx(0.0, -1.0)]
        ];
        let k = kron(&a, &b);
        assert_eq!(k.dim(), (4, 4));
        assert_eq!(k[[0, 0]], cx(0.0, 1.0)); // a00*b00
        assert_eq!(k[[1, 1]], cx(0.0, -1.0)); // a00*b11
        assert_eq!(k[[0, 2]], cx(0.0, 2.0)); // a01*b00
        assert_eq!(k[[3, 3]], cx(0.0, -4.0)); // a11*b11
    }

    #[test]
    fn invert_recovers_identity() {
        for d in [2usize, 3, 5, 9] {
            let a = random_matrix(d, 17 + d as u64);
            let ainv = invert(&a).unwrap();
            assert!(identity_residual(&a.dot(&ainv)) < TOL, "d={d}");
            assert!(identity_residual(&ainv.dot(&a)) < TOL, "d={d}");
        }
    }

    #[test]
    fn invert_rejects_singular() {
        let mut a = zeros(3);
        a[[0, 0]] = cx(1.0, 0.0);
        a[[1, 1]] = cx(1.0, 0.0);
        // third row identically zero
        assert!(matches!(invert(&a), Err(RmxError::Domain(_))));
    }

    #[test]
    fn invert_rejects_non_square() {
        let a: CMatrix = Array2::zeros((2, 3));
        assert!(matches!(invert(&a), Err(RmxError::Dimension(_))));
    }

    #[test]
    fn embed_pair_agrees_with_kronecker_structure() {
        // For r = A ⊗ B the three embeddings have closed Kronecker forms:
        //   (0,1): A ⊗ B ⊗ 1,  (1,2): 1 ⊗ A ⊗ B,  (0,2): A ⊗ 1 ⊗ B.
        let n = 3;
        let a = random_matrix(n, 5);
        let b = random_matrix(n, 6);
        let r = kron(&a, &b);
        let idn = eye(n);

        let e01 = embed_pair(&r, 0, 1, n).unwrap();
        let e12 = embed_pair(&r, 1, 2, n).unwrap();
        let e02 = embed_pair(&r, 0, 2, n).unwrap();

        assert!(max_norm_diff(&e01, &kron(&kron(&a, &b), &idn)).unwrap() < TOL);
        assert!(max_norm_diff(&e12, &kron(&idn, &kron(&a, &b))).unwrap() < TOL);
        assert!(max_norm_diff(&e02, &kron(&kron(&a, &idn), &b)).unwrap() < TOL);
    }

    #[test]
    fn embed_pair_rejects_bad_slots() {
        let r = zeros(4);
        assert!(embed_pair(&r, 1, 1, 2).is_err());
        assert!(embed_pair(&r, 2, 1, 2).is_err());
        assert!(embed_pair(&r, 0, 3, 2).is_err());
    }

    #[test]
    fn partial_transpose_is_involution_and_acts_on_second_factor() {
        let n = 3;
        let a = random_matrix(n, 11);
        let b = random_matrix(n, 12);
        let r = kron(&a, &b);
        // t2 of A ⊗ B is A ⊗ B^T
        let t2 = partial_transpose_second(&r, n).unwrap();
        assert!(max_norm_diff(&t2, &kron(&a, &b.t().to_owned())).unwrap() < TOL);
        // involution
        let back = partial_transpose_second(&t2, n).unwrap();
        assert!(max_norm_diff(&back, &r).unwrap() < TOL);
    }

    #[test]
    fn norms_and_shape_guards() {
        let a = random_matrix(2, 1);
        let b = random_matrix(3, 2);
        assert!(matches!(
            max_norm_diff(&a, &b),
            Err(RmxError::Dimension(_))
        ));
        assert!(max_norm(&eye(4)) == 1.0);
    }
}
