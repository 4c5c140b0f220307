use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented precondition or type invariant.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The symmetric eigen-solver did not produce a usable decomposition.
    #[error("eigen-solver failure: {0}")]
    EigenSolver(String),

    /// A pinch value fell below the singular tolerance, so `1/f^2` is not usable.
    #[error("pinch value f(mu_{{{i}->{j}}}) = {value:e} is below the singular tolerance {tol:e}")]
    SingularPinch { i: usize, j: usize, value: f64, tol: f64 },

    /// A kernel neighbourhood contained no point with positive weight and nonzero offset.
    #[error("empty neighbourhood: no point with positive kernel weight within radius {eta}")]
    EmptyNeighborhood { eta: f64 },

    #[error("degenerate push-forward: Jacobian is rank deficient on a {dim}-dimensional flag level")]
    DegeneratePushforward { dim: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EigenSolver(_)
                | Error::SingularPinch { .. }
                | Error::DegeneratePushforward { .. }
                | Error::Numerical(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
