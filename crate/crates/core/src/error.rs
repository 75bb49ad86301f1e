use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{location}: {message}")]
    Config { location: String, message: String },

    #[error("unknown parameter key `{key}`; valid keys are: {valid}")]
    UnknownKey { key: String, valid: String },

    #[error("steady-state denominator vanishes (|den| = {magnitude:e}); the linear response is resonant")]
    DegenerateDenominator { magnitude: f64 },

    #[error("self-consistent working point did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("eigenvalue solver failed to converge")]
    EigenSolver,

    #[error("system has no steady state (max Lyapunov exponent {max_lyapunov:e} rad/s)")]
    UnstableSystem { max_lyapunov: f64 },

    #[error("Lyapunov system is numerically singular (pivot ratio {pivot_ratio:e})")]
    SingularSolve { pivot_ratio: f64 },

    #[error("covariance matrix is not physical: {0}")]
    NonPhysicalCM(String),

    #[error("eta_minus cross-check failed: determinant formula {formula}, symplectic spectrum {symplectic}")]
    CrossCheckMismatch { formula: f64, symplectic: f64 },

    #[error("invalid bracket: {0}")]
    BracketInvalid(String),

    #[error("unknown figure preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid sweep specification: {0}")]
    InvalidSweep(String),
}

impl Error {
    /// Short machine-readable code, used in the `error` column of sweep tables.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid_params",
            Error::Config { .. } => "config",
            Error::UnknownKey { .. } => "unknown_key",
            Error::DegenerateDenominator { .. } => "degenerate_denominator",
            Error::NonConvergence { .. } => "non_convergence",
            Error::EigenSolver => "eigen_solver",
            Error::UnstableSystem { .. } => "unstable_system",
            Error::SingularSolve { .. } => "singular_solve",
            Error::NonPhysicalCM(_) => "non_physical_cm",
            Error::CrossCheckMismatch { .. } => "cross_check_mismatch",
            Error::BracketInvalid(_) => "bracket_invalid",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::InvalidSweep(_) => "invalid_sweep",
        }
    }
}
