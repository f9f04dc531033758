use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("tensor product of dimension {dim} exceeds the supported maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("matrix contains NaN or infinite entries")]
    NonFinite,

    #[error("matrix is not Hermitian: |h - h†| = {asymmetry:.3e} at ({row}, {col})")]
    NotHermitian { asymmetry: f64, row: usize, col: usize },

    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is {trace:.12}, expected 1")]
    Trace { trace: f64 },

    #[error("vector norm is {norm:.12}, expected 1")]
    NonUnitVector { norm: f64 },

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("{what} = {value} is outside its domain {domain}")]
    Domain { what: &'static str, value: f64, domain: &'static str },

    #[error("state lies outside the classified families; no verdict available")]
    NoVerdict,

    #[error("accepted outcomes have total probability {accepted_prob:.3e}; post-selection undefined")]
    ProtocolFailure { accepted_prob: f64 },

    #[error("integration quality: {detail} (try a smaller step)")]
    IntegrationQuality { detail: String },

    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}
