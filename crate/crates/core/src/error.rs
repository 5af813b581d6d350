//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Matrix dimensions do not fit the requested operation.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A constructor was handed NaN or infinite entries.
    #[error("matrix entries must be finite")]
    NonFinite,

    /// Tolerance values outside the accepted range.
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    /// A decomposition or solve failed to produce a usable result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Drazin axiom residuals exceeded ten times the equality tolerance.
    #[error(
        "ill-conditioned instance: axiom residuals commute={commute:.3e} inner={inner:.3e} power={power:.3e} exceed 10x eq_rtol={limit:.3e}"
    )]
    IllConditioned {
        commute: f64,
        inner: f64,
        power: f64,
        limit: f64,
    },

    /// The group inverse is only defined for index 0 or 1.
    #[error("group inverse requires index <= 1, computed index {index}")]
    GroupIndex { index: usize },

    /// One or more hypothesis products failed the vanishing check.
    #[error("hypothesis violation for {set}: {}", format_failures(failures))]
    HypothesisViolation {
        set: String,
        /// Failing condition labels with their relative residuals.
        failures: Vec<(String, f64)>,
    },

    /// The instance kind does not match what the operation expects.
    #[error("instance kind mismatch: expected {expected}")]
    KindMismatch { expected: &'static str },

    /// An instance generator exhausted its retry budget or was asked for
    /// dimensions that admit no solution.
    #[error("generation failed: {0}")]
    Generation(String),
}

fn format_failures(failures: &[(String, f64)]) -> String {
    failures
        .iter()
        .map(|(label, res)| format!("{label} (residual {res:.3e})"))
        .collect::<Vec<_>>()
        .join(", ")
}
