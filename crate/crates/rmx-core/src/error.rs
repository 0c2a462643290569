//! Error taxonomy shared by every module in the crate.
//!
//! The five variants map onto the failure modes of the numerical kernels:
//!
//! * [`RmxError::Domain`] — input outside the mathematical domain of an
//!   operation (e.g. a modular parameter with `Im(tau) <= 0`, or `n < 2`);
//! * [`RmxError::NonConvergent`] — a truncated series, product, or
//!   quadrature could not meet the requested tolerance within its caps;
//! * [`RmxError::Pole`] — an evaluation landed on (or numerically too close
//!   to) a pole of the expression being computed;
//! * [`RmxError::Dimension`] — matrix operands with incompatible shapes;
//! * [`RmxError::ConvergenceViolation`] — a scan whose error column must
//!   strictly decrease failed to do so.

use thiserror::Error;

/// Unified error type for all evaluations and identity checks.
#[derive(Debug, Error)]
pub enum RmxError {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A truncated series, product, or quadrature failed to reach the
    /// requested tolerance before hitting its term/depth/panel cap.
    #[error("failed to converge: {0}")]
    NonConvergent(String),

    /// Evaluation hit a pole (a vanishing denominator) of the expression.
    #[error("pole encountered: {0}")]
    Pole(String),

    /// Matrix operands with incompatible dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A convergence scan whose error must strictly decrease increased
    /// at some step.
    #[error("convergence violation: {0}")]
    ConvergenceViolation(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, RmxError>;
