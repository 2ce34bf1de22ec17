use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid ZC configuration: {0}")]
    InvalidZcConfig(String),

    #[error("shift index {shift} out of range (subset size {n_ss})")]
    ShiftOutOfRange { shift: usize, n_ss: usize },

    #[error("cell too large for single-root orthogonality: N_CS = {n_cs} >= N_ZC = {n_zc}")]
    CellTooLarge { n_cs: usize, n_zc: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid shift plan: {0}")]
    InvalidShiftPlan(String),

    #[error("combination index {index} out of range for C({n}, {k}) = {count}")]
    RankOutOfRange { index: u64, n: usize, k: usize, count: u64 },

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid pool: {0}")]
    InvalidPool(String),

    #[error("invalid analytic parameters: {0}")]
    InvalidParams(String),

    #[error("invalid channel model: {0}")]
    InvalidChannel(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("despreading vector has zero norm")]
    ZeroDespreader,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
