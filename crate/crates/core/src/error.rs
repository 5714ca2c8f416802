use thiserror::Error;

use crate::experiments::config::ConfigError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A request that cannot be satisfied, e.g. a regular graph that does
    /// not exist or destinations that do not fit on a shape.
    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
