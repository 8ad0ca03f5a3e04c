//! Crate-wide error type.

/// Errors produced by constructors, solvers, and scans.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("driving time must be positive, got {0}")]
    NonPositiveTau(f64),

    #[error("horizon must be positive, got {0}")]
    InvalidHorizon(f64),

    #[error("unphysical Bloch vector: |r| = {norm} exceeds 1")]
    UnphysicalState { norm: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid matrix derivative: {0}")]
    InvalidMatrixDerivative(String),

    #[error("quadrature did not converge: achieved {achieved:.3e}, target {target:.3e}")]
    QuadratureNonConvergence { achieved: f64, target: f64 },

    #[error("grid resolution insufficient: {0}")]
    GridResolution(String),

    #[error("integrator step rejected at t = {t}: local error {error:.3e} exceeds tolerance {tolerance:.3e}")]
    StepRejected { t: f64, error: f64, tolerance: f64 },

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("empty grid: {0}")]
    EmptyGrid(String),
}

impl Error {
    /// True for errors that indicate a numerical-method failure rather than
    /// invalid input. CLI consumers map these to a distinct exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergence { .. }
                | Error::GridResolution(_)
                | Error::StepRejected { .. }
        )
    }
}
