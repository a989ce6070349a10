use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex id {0}")]
    UnknownVertex(usize),

    #[error("unknown edge id {0}")]
    UnknownEdge(usize),

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("empty range: {0}")]
    EmptyRange(String),

    #[error("edge set is not connected; components: {components:?}")]
    Disconnected { components: Vec<Vec<usize>> },

    #[error("enumeration budget exhausted after {examined} sets (a priori bound {estimate:.3e})")]
    Resource { examined: u64, estimate: f64 },

    #[error("factorization failed at pivot {pivot}")]
    Factorization { pivot: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("weight d is not intrinsic at vertices {0:?}")]
    NotIntrinsic(Vec<usize>),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
