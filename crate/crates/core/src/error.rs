use thiserror::Error;

use crate::interval::Interval;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("interval count {count} exceeds the cap {cap}")]
    TooManyIntervals { count: u128, cap: u64 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("grid mismatch: {0} vs {1}")]
    GridMismatch(usize, usize),

    #[error("power iteration did not converge after {iterations} iterations (best sigma {best_estimate}, residual {residual})")]
    NotConverged {
        iterations: usize,
        best_estimate: f64,
        residual: f64,
    },

    #[error("no admissible function: the fattened frequency support is empty")]
    EmptySupport,

    #[error("dyadic interval {0} contains no hole of the requested length")]
    PorosityViolation(Box<Interval>),

    #[error("band 2^{band_log2} does not fit a grid of size {n} (need 2^(k+k0) <= N/4)")]
    BandTooLarge { band_log2: u32, n: usize },

    #[error("Fourier support leakage {leak:e} above the allowed {allowed:e}")]
    SupportLeakage { leak: f64, allowed: f64 },

    #[error("{timeouts} of {walks} walks hit the step cap (limit is 0.1%)")]
    TooManyTimeouts { timeouts: u64, walks: u64 },

    #[error("estimate is zero at r = {0}; cannot take log(1/p)")]
    ZeroEstimate(f64),

    #[error("regression needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("nonpositive value {value} at entry {index}; log undefined")]
    NonPositive { index: usize, value: f64 },

    #[error("no k0 in 1..={max} satisfies the mollifier bounds")]
    NoK0Found { max: u32 },

    #[error("bound violated: {0}")]
    BoundViolated(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
