//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by sequence construction, analysis, and integration.
#[derive(Debug, Error)]
pub enum Error {
    /// Twin sequences need at least two half-sequence pulses.
    #[error("sequence parameter n must be at least 2, got {0}")]
    InvalidN(u32),

    #[error("unknown sequence family `{0}`")]
    UnknownFamily(String),

    #[error("unknown reference sequence `{0}`")]
    UnknownReference(String),

    #[error("pulse area must be a positive number of quarter-pi units")]
    InvalidArea,

    #[error("threshold must lie strictly between 0 and 1, got {0}")]
    InvalidThreshold(f64),

    #[error("epsilon grid needs at least 2 points and min < max")]
    InvalidGrid,

    #[error("envelope needs at least two samples")]
    EnvelopeTooShort,

    #[error("envelope time samples must be strictly increasing")]
    NonMonotonicTime,

    #[error("envelope Rabi frequency samples must be nonnegative")]
    NegativeRabiFrequency,

    #[error("envelope area must be positive, got {0}")]
    NonPositiveArea(f64),

    #[error("sequence has {expected} pulses but {got} envelopes were supplied")]
    EnvelopeCountMismatch { expected: usize, got: usize },

    #[error("envelope area {got} does not realize pulse area {expected} (|diff| > {tol})")]
    EnvelopeAreaMismatch { expected: f64, got: f64, tol: f64 },

    #[error("coefficient extraction is unreliable: re-evaluation residual {0:.3e} exceeds 1e-8")]
    IllConditioned(f64),

    #[error("order fit has no usable window: survival probability underflows everywhere")]
    OrderFitUnderflow,

    #[error("order fit precondition violated: 1 - P(0) = {0:.3e} exceeds 1e-12")]
    NotAPiPulse(f64),

    #[error("invalid sequence file: {0}")]
    InvalidSequenceFile(String),

    #[error("invalid envelope file: {0}")]
    InvalidEnvelopeFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
