use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported quiver: {0}")]
    UnsupportedQuiver(String),
    #[error("vector length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("weight is not regular or has a zero entry: {0}")]
    NonRegularWeight(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("degree {degree} is beyond the built cap {cap}")]
    DegreeBeyondCap { degree: i64, cap: usize },
    #[error("no nondegenerate trace form found after {tries} seeds starting at {seed}")]
    DegenerateTrace { seed: u64, tries: u32 },
    #[error("unknown subspace label {0:?}")]
    UnknownLabel(String),
    #[error("stabilization inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
