use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid value: {0}")]
    Value(String),
    #[error("instance generation failed: {0}")]
    Generation(String),
    #[error("simplex did not converge within {iterations} iterations")]
    Numerical { iterations: usize },
    #[error("instance is infeasible: {0}")]
    InfeasibleInstance(String),
    #[error("instance has no quadratic constraint")]
    MissingConstraint,
    #[error("bound set lacks {0}")]
    MissingBounds(&'static str),
    #[error("cut family `{cuts}` cannot be added to variant `{variant}`")]
    IncompatibleVariant { variant: String, cuts: String },
    #[error("point is not feasible for the instance")]
    InfeasiblePoint,
    #[error("enumeration over {0} variables exceeds the oracle limit")]
    TooLarge(usize),
    #[error("LP relaxation is unbounded")]
    Unbounded,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
