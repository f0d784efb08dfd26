use thiserror::Error;

/// Errors produced by state construction, interference and estimation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capacity exceeded: {what} needs {required} basis vectors, cap is {cap}")]
    Capacity {
        what: String,
        required: u128,
        cap: u128,
    },

    #[error("truncation tail mass {tail_mass:.3e} exceeds tolerance {tolerance:.1e}; try cutoff >= {suggested_cutoff}")]
    Truncation {
        tail_mass: f64,
        tolerance: f64,
        suggested_cutoff: usize,
    },

    #[error("entropy undefined: estimated trace {0} is not positive (too few samples?)")]
    UndefinedEntropy(f64),

    #[error("series did not converge: remainder bound {remainder:.3e} after n_max = {n_max}")]
    SeriesNotConverged { remainder: f64, n_max: usize },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
