use thiserror::Error;

/// Errors raised by the estimation, simulation and ingestion routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data is malformed, non-finite or otherwise unusable.
    #[error("data error: {0}")]
    Data(String),

    /// A tail fraction or configuration violates its validity rules.
    #[error("invalid configuration: {0}")]
    Validation(String),

    /// The optimal sample-fraction formula is singular for these constants.
    #[error("formula-singular: {0}")]
    FormulaSingular(String),

    /// All observations used by an estimator coincide.
    #[error("degenerate: {0}")]
    Degenerate(String),

    /// Tail parameters leave no probability mass for the midrange.
    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),

    /// No positive midrange weights exist for the requested mean.
    #[error("infeasible mean {mu}: {reason}")]
    InfeasibleMean { mu: f64, reason: String },

    /// A profile equation could not be solved.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// The tail-index search ran into the alpha > 1 boundary.
    #[error("constraint boundary: {0}")]
    ConstraintBoundary(String),

    /// The likelihood ratio never crossed the cutoff on one side.
    #[error("unbounded {side} endpoint: l stayed below {cutoff} out to {reached}")]
    UnboundedSide {
        side: Side,
        cutoff: f64,
        reached: f64,
    },

    /// Too many replications failed in a Monte Carlo experiment.
    #[error("experiment failed: {0}")]
    Experiment(String),

    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Lower => f.write_str("lower"),
            Side::Upper => f.write_str("upper"),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
