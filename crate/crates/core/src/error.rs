use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid mass structure: {0}")]
    InvalidMass(String),

    #[error("invalid stiffness matrix: {0}")]
    InvalidStiffness(String),

    #[error("unsupported scheme order {0} (expected 2, 4, 6 or 8)")]
    UnsupportedOrder(u32),

    #[error("invalid timestep {0}")]
    InvalidTimestep(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid derivative word: {0}")]
    InvalidWord(String),

    #[error("word {word} exceeds the supported derivative depth {max}")]
    WordTooDeep { word: String, max: usize },

    #[error("non-finite result while evaluating {0}")]
    Singular(String),

    #[error(
        "push solver did not converge in {iterations} iterations \
         (tau = {tau}, residual = {residual:e}, q = {q:?}, p = {p:?})"
    )]
    PushDiverged {
        iterations: usize,
        tau: f64,
        residual: f64,
        q: Vec<f64>,
        p: Vec<f64>,
    },

    #[error("time grids do not match: {0}")]
    TimeGridMismatch(String),

    #[error("not enough zero crossings to estimate a period (found {0})")]
    InsufficientCrossings(usize),

    #[error("invalid analysis input: {0}")]
    InvalidInput(String),

    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;
