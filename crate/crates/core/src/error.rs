use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("path loss exponent must be > 2, got {alpha}")]
    AlphaOutOfRange { alpha: f64 },

    #[error("invalid network model: {0}")]
    InvalidModel(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("consecutive path nodes {a} and {b} are co-located")]
    ZeroDistance { a: usize, b: usize },

    #[error("sampled eavesdropper kept landing on a transmitter after {resamples} resamples")]
    DegenerateWindow { resamples: u32 },

    #[error("quadrature did not reach the requested tolerance ({requested:e}) within {subdivisions} subdivisions; error estimate {achieved:e}")]
    QuadratureNonConvergence {
        requested: f64,
        achieved: f64,
        subdivisions: usize,
    },

    #[error("hypoexponential rates are degenerate: {0}")]
    NumericallyDegenerateRates(String),

    #[error("routing requires equal transmit powers (relative spread {spread:e})")]
    UnequalPowers { spread: f64 },

    #[error("exhaustive search over {nodes} nodes exceeds the guard of {guard}")]
    TooLarge { nodes: usize, guard: usize },

    #[error("no route from {src} to {dst}")]
    Unreachable { src: usize, dst: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
