use thiserror::Error;

/// Domain errors shared by all modules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate cusp: a cusp entry vanishes, the chart is not type-preserving")]
    DegenerateCusp,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("bad step: {0}")]
    BadStep(String),
    #[error("negative square: |tr γ²| < 2")]
    NegativeSquare,
    #[error("matrix is not parabolic")]
    NotParabolic,
    #[error("inadmissible: {0}")]
    Inadmissible(String),
    #[error("empty component: (e, s) = ({euler}, {signs})")]
    EmptyComponent { euler: i32, signs: String },
    #[error("division by zero")]
    DivByZero,
    #[error("no real solution")]
    NoRealSolution,
    #[error("orbit too short: {0} points, need at least 16")]
    ShortOrbit(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
