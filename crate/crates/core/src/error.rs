use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("accuracy loss: {0}")]
    AccuracyLoss(String),
    #[error("pole of the scattering matrix at {0}")]
    Pole(String),
    #[error("mode sum not converged before the mode cap {cap}")]
    Truncation { cap: usize },
    #[error("zero on the contour after {retries} perturbations")]
    BoundaryZero { retries: usize },
    #[error("winding number {value} is not close to an integer")]
    NonIntegerWinding { value: f64 },
    #[error("Newton iteration diverged: {0}")]
    Divergence(String),
    #[error("box cover counts {cover} zeros but {refined} were refined")]
    CoverMismatch { cover: usize, refined: usize },
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("fit failure: {0}")]
    Fit(String),
    #[error("phase unwrapping failed between {0} and {1}")]
    Unwrap(f64, f64),
    #[error("tail bound unusable, t must exceed {t_min}")]
    TailBound { t_min: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
