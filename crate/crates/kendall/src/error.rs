//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors reported by constructors, evaluators and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KendallError {
    /// The convolution exponent must be positive and finite.
    #[error("alpha must be a positive finite number, got {0}")]
    InvalidAlpha(f64),

    /// A positive finite parameter (scale, moment, level, ...) was not.
    #[error("{name} must be a positive finite number, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    /// A tabulated step law failed validation.
    #[error("invalid tabulated law: {0}")]
    InvalidTable(String),

    /// An argument landed outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),

    /// A closed form is undefined at (or numerically too close to) a
    /// removable singularity of its coefficients.
    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    /// Williamson inversion detected an invalid transform.
    #[error("williamson inversion failed: {0}")]
    Inversion(String),

    /// Adaptive quadrature ran out of depth before reaching the requested
    /// absolute tolerance.
    #[error("quadrature did not reach tolerance {requested:.3e} (error estimate {achieved:.3e})")]
    QuadratureAccuracy { requested: f64, achieved: f64 },

    /// The simulation horizon cannot resolve the requested statistic.
    #[error("horizon {horizon} is too small: {why}")]
    InsufficientHorizon { horizon: u32, why: String },
}

pub type Result<T> = std::result::Result<T, KendallError>;
