use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// The Toeplitz system stopped being positive definite during the
    /// Levinson recursion.
    #[error(
        "numerical degeneracy at prediction order {order}: \
         error variance {value:.3e} fell below tolerance"
    )]
    NumericalDegeneracy { order: usize, value: f64 },

    /// Every branch metric at one trellis step underflowed to zero, so the
    /// forward/backward recursion cannot be normalized.
    #[error("branch metrics vanished at trellis step {step}")]
    NumericalFailure { step: usize },

    #[error("target SINR {target_db:.3} dB unreachable; upper bound is {ub_db:.3} dB")]
    UnreachableTarget { target_db: f64, ub_db: f64 },

    /// Single transmit antenna with zero noise: the interference sum is
    /// empty and the SINR diverges.
    #[error("SINR is unbounded (single transmit antenna, zero noise)")]
    InfiniteSinr,

    #[error("antenna index {index} out of range 1..={n_t}")]
    AntennaIndex { index: usize, n_t: usize },

    /// No qualifying positions for the semi-analytic estimate; the caller
    /// records P_f = 0.5 for such frames.
    #[error("degenerate frame: no qualifying LLR positions")]
    DegenerateFrame,

    #[error("insufficient data: {0} values, need at least {1}")]
    InsufficientData(usize, usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
