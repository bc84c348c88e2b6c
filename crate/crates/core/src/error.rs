use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by geometry, field construction, flows and the experiment driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("chart derivatives are degenerate at parameters {params:?}")]
    ChartDegeneracy { params: [f64; 2] },

    #[error("point lies outside the tubular neighbourhood (signed distance {signed_distance}, reach {reach})")]
    OutOfTube { signed_distance: f64, reach: f64 },

    #[error("closest-point iteration did not converge after {iterations} iterations")]
    ClosestPoint { iterations: usize },

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("flow inversion failed after {iterations} iterations (residual {residual:e})")]
    Inversion { iterations: usize, residual: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
