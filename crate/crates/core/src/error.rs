use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: &'static str,
    },

    #[error("matrix is not Hermitian within {tol:e} ({context})")]
    NotHermitian { tol: f64, context: &'static str },

    #[error("matrix is not a projector within {tol:e} ({context})")]
    NotProjector { tol: f64, context: &'static str },

    #[error("not a density matrix within {tol:e} ({context})")]
    NotDensity { tol: f64, context: &'static str },

    #[error("vector is not normalized: norm {norm} ({context})")]
    NotNormalized { norm: f64, context: &'static str },

    #[error("kets are not orthonormal: |<k{i}|k{j}> - delta| = {residual:e}")]
    NotOrthonormal { i: usize, j: usize, residual: f64 },

    #[error("projectors {i} and {j} are not mutually orthogonal")]
    NotOrthogonal { i: usize, j: usize },

    #[error("projector family is incomplete: |sum P_i - I| = {residual:e}")]
    IncompleteFamily { residual: f64 },

    #[error("index {index} out of range (0..{len}) for {context}")]
    IndexOutOfRange {
        index: usize,
        len: usize,
        context: &'static str,
    },

    #[error("initial state violates {0}")]
    InvalidInitialState(&'static str),

    #[error("outcome sequence has vanishing probability {probability:e} at t = {t}")]
    VanishingProbability { t: f64, probability: f64 },

    #[error("matrix exponential did not converge: {0}")]
    ExpmNonConvergence(String),

    #[error("Hermitian eigendecomposition did not converge")]
    EigNonConvergence,

    #[error("Pauli reduction requires rank-1 family (projector {index} has rank {rank})")]
    RankOneRequired { index: usize, rank: usize },

    #[error("generator consistency check failed: {check} (residual {residual:e})")]
    GeneratorMismatch { check: &'static str, residual: f64 },

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
