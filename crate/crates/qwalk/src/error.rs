use thiserror::Error;

/// Errors reported by state construction, walk configuration and measurement.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("hypercube dimension must be at least 2, got {0}")]
    DimensionTooSmall(u32),

    #[error("hypercube dimension {0} exceeds the supported maximum {1}")]
    DimensionTooLarge(u32, u32),

    #[error("state with {coins} coin directions over a {bits}-bit vertex register exceeds capacity")]
    CapacityExceeded { coins: usize, bits: u32 },

    #[error("coin dimension must be at least 1")]
    EmptyCoin,

    #[error("state shapes differ: {left_coins}x2^{left_bits} vs {right_coins}x2^{right_bits}")]
    ShapeMismatch {
        left_coins: usize,
        left_bits: u32,
        right_coins: usize,
        right_bits: u32,
    },

    #[error("squared norm deviates from 1 by {0:e}")]
    NotNormalized(f64),

    #[error("marked vertex {vertex} is out of range for dimension {n}")]
    MarkedOutOfRange { vertex: u64, n: u32 },

    #[error("marked set is empty")]
    EmptyMarkedSet,

    #[error("marked set contains vertex {0} more than once")]
    DuplicateMarked(u64),

    #[error("operation requires exactly one marked vertex, got {0}")]
    SingleTargetRequired(usize),

    #[error("shift requires as many coin directions as vertex bits, got {coins} over {bits} bits")]
    ShiftShape { coins: usize, bits: u32 },

    #[error("self-loop shift requires one coin direction more than vertex bits, got {coins} over {bits} bits")]
    SelfLoopShiftShape { coins: usize, bits: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
