use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("site {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("eigenvalue decomposition failed: {0}")]
    Decomposition(String),
    #[error("matrix is singular: {0}")]
    Singular(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Bethe solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        last_iterate: Vec<num_complex::Complex64>,
    },
    #[error("Bethe roots collided: {0}")]
    RootCollision(String),
    #[error("expression parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
