use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MdfError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("not a state: {0}")]
    NotAState(String),
    #[error("state is not faithful: smallest eigenvalue {min_eigenvalue:e} below {threshold:e}")]
    NotFaithful { min_eigenvalue: f64, threshold: f64 },
    #[error("vector is not J-real: Hermiticity residual {residual:e}")]
    NotJReal { residual: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("analytic continuation overflow: |Im z| * max|kappa| = {exponent} exceeds 700")]
    Overflow { exponent: f64 },
    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),
    #[error("kernel is not admissible: {0}")]
    NotAdmissible(String),
    #[error("balance condition violated: residual {residual:e}")]
    BalanceViolated { residual: f64 },
    #[error("operator is not self-adjoint: residual {residual:e}")]
    NotSelfAdjoint { residual: f64 },
    #[error("engines disagree: relative difference {relative:e} exceeds {tolerance:e}")]
    EngineDisagreement { relative: f64, tolerance: f64 },
    #[error("dimension {dim} exceeds the supported maximum {max} (set MDF_MAX_DIM to override)")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, MdfError>;
