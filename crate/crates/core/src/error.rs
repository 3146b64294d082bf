use thiserror::Error;

/// Errors raised by the solver and the estimate experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("expected {expected} samples, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dyadic scale 2^{exponent} outside the resolvable range [{min}, {max}]")]
    DyadicOutOfRange { exponent: i32, min: f64, max: f64 },

    #[error("aliasing guard: {0}")]
    Aliasing(String),

    #[error("support violation: {0}")]
    Support(String),

    #[error("waves reach the outer wall: {0}")]
    WallReached(String),

    #[error("time meshes do not match: {0}")]
    MeshMismatch(String),

    #[error("blow-up at t = {time}: norm grew by a factor {growth:.3e}")]
    BlowUp { time: f64, growth: f64 },

    #[error("Picard iteration diverges (differences {0:?})")]
    Divergence(Vec<f64>),

    #[error("no time in [{lo:.3e}, {hi:.3e}] passes the contraction test")]
    NoPassingTime { lo: f64, hi: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
