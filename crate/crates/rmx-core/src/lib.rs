//! Numerical library for the Z_n-symmetric (Belavin) elliptic R-matrix,
//! its two trigonometric degenerations, and the twist relating them.
//!
//! Module map:
//!
//! * [`theta_kernel`] — theta functions with rational characteristics,
//!   their shift identity, and the modular S-move in ratio form;
//! * [`qproducts`] — multi-nome infinite products, the scalar dressing
//!   `g1`, the elliptic prefactor, and the `κ(β)` quadrature;
//! * [`znrmatrix`] — the Weyl pair `h, g`, the monomials `I_α`, the two
//!   constructions of the bare R-matrix `S̄`, and the dressed `S`;
//! * [`trig_limits`] — closed-form degenerations `R^DY` (scaling limit)
//!   and `R^Q` (ordinary limit), their `n = 2` specializations, and
//!   convergence scans along the degeneration paths;
//! * [`twist`] — the discrete Fourier matrix `M`, the twist
//!   `F₁₂ = (M ⊗ M)·P`, the modular matrix identity, and the conjugation
//!   sending `R^Q` to `R^DY`;
//! * [`property_suite`] — named, seeded, reproducible residual checks for
//!   every identity above, plus convergence tables;
//! * [`cnum`], [`matrix`], [`error`] — scalar/matrix/error plumbing.

pub mod cnum;
pub mod error;
pub mod matrix;
pub mod property_suite;
pub mod qproducts;
pub mod theta_kernel;
pub mod trig_limits;
pub mod twist;
pub mod znrmatrix;

pub use cnum::C64;
pub use error::{Result, RmxError};
pub use matrix::CMatrix;
