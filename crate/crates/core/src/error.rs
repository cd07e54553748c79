use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian (max asymmetry {max_asymmetry:.3e})")]
    NotHermitian { max_asymmetry: f64 },
    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("eigensolver did not converge after {sweeps} sweeps (residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid program state: {0}")]
    InvalidProgram(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("vacuous threshold {threshold}: no pair of pure states has D above 1")]
    VacuousThreshold { threshold: f64 },
    #[error("packing budget exhausted: {count} points after budget {budget}, needed {needed}")]
    BudgetExhausted { count: usize, needed: f64, budget: usize },
    #[error("net separation {min_pairwise} does not exceed threshold {threshold}")]
    ThresholdViolated { min_pairwise: f64, threshold: f64 },
    #[error("mixture precondition fails: trace norm {measured} exceeds eps {eps}")]
    Lemma1Precondition { measured: f64, eps: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
