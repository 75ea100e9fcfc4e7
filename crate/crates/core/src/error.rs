use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A Taylor coefficient (or a solver step) produced a non-finite value.
    #[error("numeric overflow: non-finite value in Taylor coefficient of order {order}")]
    Overflow { order: usize },

    #[error("non-finite field value at node {node}")]
    NonFinite { node: usize },

    #[error("solver failed at step {step}: {source}")]
    SolverStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular evaluation: denominator {value:e} at node {node}")]
    SingularEvaluation { node: usize, value: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("spectral radius estimate did not converge after {iterations} iterations (last estimate {last})")]
    Estimation { iterations: usize, last: f64 },

    #[error("normal equations are singular; use beta > 0 for rank-deficient state matrices")]
    SingularSystem,

    #[error("ground truth unavailable at step {step} (series has {available} samples)")]
    DataAvailability { step: usize, available: usize },

    #[error("undefined metric: truth norm is zero")]
    UndefinedMetric,

    #[error("degenerate scaling: envelope has zero norm")]
    DegenerateScaling,

    #[error("format error: {0}")]
    Format(String),

    #[error("parse error at line {line}, key `{key}`: {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
