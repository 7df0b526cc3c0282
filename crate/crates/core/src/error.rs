use thiserror::Error;

use crate::group::GroupPoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point has {found} coordinates, group expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("operands live on different groups ({left} vs {right})")]
    GroupMismatch { left: String, right: String },

    #[error("matrix size mismatch: expected {expected}x{expected}, found {found}x{found}")]
    MatrixDimMismatch { expected: usize, found: usize },

    #[error("operation requires a finite group, got {0}")]
    GroupNotFinite(String),

    /// The finite section at `radius` is singular or too badly conditioned.
    #[error("not invertible at section radius {radius} (condition estimate {condition:e})")]
    NotInvertibleAtScale { radius: u32, condition: f64 },

    #[error("contour node {node} failed: {source}")]
    ContourNode {
        node: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("Neumann series diverges in norm: q = {0} >= 1")]
    NeumannDivergent(f64),

    #[error("eigenvalue iteration did not converge for a {0}x{0} matrix")]
    EigenNoConvergence(usize),

    #[error("ideal envelope exceeds kernel envelope at {0:?}")]
    IdealNotDominated(GroupPoint),

    #[error("decay fit needs at least 5 buckets, got {0}")]
    TooFewBuckets(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
