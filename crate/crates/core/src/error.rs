use thiserror::Error;

/// Errors raised by the numerical core and the verification harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input is not Hermitian: max deviation {deviation:e} exceeds tolerance {tolerance:e}")]
    NonHermitianInput { deviation: f64, tolerance: f64 },

    #[error("{solver} did not converge after {sweeps} sweeps (residual {residual:e})")]
    ConvergenceFailure {
        solver: &'static str,
        sweeps: usize,
        residual: f64,
    },

    #[error("{function} is undefined at {at}")]
    DomainError { function: String, at: f64 },

    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid norm specification: {0}")]
    InvalidSpec(String),

    #[error("factor is not positive semidefinite (smallest eigenvalue {0:e})")]
    NonPositiveFactor(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tail mass {tail:e} exceeds {limit:e} of the total; widen the grid")]
    TailMassTooLarge { tail: f64, limit: f64 },

    #[error("spectrum contains an eigenvalue within {gap:e} of zero ({value:e})")]
    SpectrumContainsZero { value: f64, gap: f64 },

    #[error("precondition violated: {0}")]
    PreconditionError(String),

    #[error("step fell below {floor:e} before the asymptotic regime was reached")]
    StepUnderflow { floor: f64 },

    #[error("function is complex valued; use the complex spectral calculus")]
    ComplexValued,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
