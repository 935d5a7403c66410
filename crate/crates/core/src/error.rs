use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the admissible domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver did not reach its tolerance.
    #[error("no convergence in {what} after {iterations} iterations (achieved {achieved:.3e})")]
    Convergence {
        what: String,
        iterations: usize,
        achieved: f64,
    },

    /// A linear system was numerically singular.
    #[error("singular system in {what} (smallest singular value {sigma_min:.3e})")]
    Singular { what: String, sigma_min: f64 },

    /// A small divisor |omega^2 l^2 - j^2| fell below the admissible threshold.
    #[error("small divisor {divisor:.3e} at (l, j) = ({l}, {j})")]
    Resonance { l: usize, j: usize, divisor: f64 },

    /// Two independent computations of the same quantity disagree.
    #[error("cross-check `{name}` failed: {a} vs {b} (tolerance {tol:.1e})")]
    CrossCheck {
        name: String,
        a: f64,
        b: f64,
        tol: f64,
    },

    /// Truncation too small: doubling the resolution changed the result.
    #[error("resolution insufficient for {what}: relative change {change:.3e} under doubling")]
    Resolution { what: String, change: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
