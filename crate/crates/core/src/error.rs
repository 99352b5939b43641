use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Input data violates an invariant (weights, finiteness, shapes).
    #[error("{0}")]
    Validation(String),

    #[error("missing moment gamma[{i},{j}]")]
    MissingMoment { i: usize, j: usize },

    /// No nonnegative representation exists at the requested tolerance.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("moment residual {best:.3e} exceeds tolerance {tol:.3e}")]
    ResidualNotMet { best: f64, tol: f64 },

    #[error("conditioning failure: {0}")]
    Conditioning(String),

    #[error("moment data is not flat (rank M(n) = {rank}, rank M(n-1) = {lower_rank}, psd = {psd})")]
    NotFlat {
        rank: usize,
        lower_rank: usize,
        psd: bool,
    },

    #[error("nonpositive weight {weight:.3e} for atom {index}; rank tolerance is likely too loose")]
    NonPositiveWeight { index: usize, weight: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Adds context to the message while keeping the variant where it carries data.
    pub fn context(self, ctx: &str) -> Self {
        match self {
            Error::Validation(m) => Error::Validation(format!("{ctx}: {m}")),
            Error::Conditioning(m) => Error::Conditioning(format!("{ctx}: {m}")),
            Error::Infeasible(m) => Error::Infeasible(format!("{ctx}: {m}")),
            other => other,
        }
    }
}
