use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("point {x} is outside the basis domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("normal matrix is rank deficient; use lambda > 0 or more data")]
    RankDeficient,
    #[error("empty dataset")]
    EmptyDataset,
    #[error(
        "QP solver did not converge after {iterations} iterations \
         (primal residual {primal_residual:.3e}, dual residual {dual_residual:.3e})"
    )]
    SolverDidNotConverge {
        iterations: usize,
        primal_residual: f64,
        dual_residual: f64,
    },
    #[error("robust fit failed its KKT certificate: {0}")]
    KktCertificate(String),
    #[error(transparent)]
    Solver(#[from] qp::SolverError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
