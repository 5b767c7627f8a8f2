//! Error type shared by every module of the crate.

/// Convenient alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
///
/// Variants are grouped so that callers (notably the CLI) can distinguish
/// *request* problems — bad parameters or malformed input files, which the
/// caller can fix — from *computation* problems — numerical non-convergence or
/// I/O failures encountered while doing otherwise-valid work.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter violated a documented precondition (value and constraint
    /// are spelled out in the message).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A sampled objective or integrand produced NaN/infinity where a finite
    /// value is required; the message names the offending abscissa.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Adaptive quadrature exhausted its subdivision budget. The best estimate
    /// reached so far is carried along with its error estimate.
    #[error(
        "quadrature did not converge within {subdivisions} subdivisions \
         (best estimate {best_estimate:e}, error estimate {error_estimate:e})"
    )]
    QuadratureNoConverge {
        best_estimate: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    /// An iterative search (bracketing, bisection) hit its iteration or range
    /// cap before meeting its goal.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// Operating-system level I/O failure while reading or writing sample
    /// files.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A sample payload was found but its mandatory sidecar is absent.
    #[error("missing sidecar for payload '{payload}': expected '{sidecar}'")]
    SidecarMissing { payload: String, sidecar: String },

    /// The sidecar exists but its content is unusable (unknown format tag,
    /// unparsable or nonpositive scale, missing key, duplicate key, ...).
    #[error("invalid sidecar '{path}': {problem}")]
    SidecarInvalid { path: String, problem: String },

    /// The payload length contradicts the sidecar's declared sample count
    /// (truncated or oversized file).
    #[error(
        "payload '{path}': sidecar declares {expected} samples but the payload \
         holds {actual}"
    )]
    PayloadCount {
        path: String,
        expected: usize,
        actual: usize,
    },
}

impl Error {
    /// True when the error reflects a bad request (caller-fixable input)
    /// rather than a failure encountered during an otherwise-valid
    /// computation. The CLI maps this to its exit-code convention.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::SidecarMissing { .. }
                | Error::SidecarInvalid { .. }
                | Error::PayloadCount { .. }
        )
    }
}
