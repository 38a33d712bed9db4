use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed manifest {path}: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field `{name}`: {reason}")]
    InvalidField { name: String, reason: String },

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("series needs ≥ 2 frames, got {0}")]
    TooFewFrames(usize),

    #[error("series mismatch: {0}")]
    SeriesMismatch(String),

    #[error("truncated raw file {path}: expected {expected} bytes, found {found}")]
    Truncated {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in field `{field}` at index {index}")]
    NonFinite { field: String, index: usize },

    #[error("invalid quantization: {0}")]
    InvalidQuantization(String),

    #[error("quantization does not cover field {field}: values [{min}, {max}] vs edges [{first}, {last}]")]
    Uncovered {
        field: usize,
        min: f64,
        max: f64,
        first: f64,
        last: f64,
    },

    #[error("unsupported arity r = {0}; singular-element detection needs r ≤ 3")]
    UnsupportedArity(usize),

    #[error("incompatible spectra: {0}")]
    IncompatibleSpectra(String),

    #[error("distribution has zero total mass")]
    EmptyDistribution,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("spectrum too large for the quadratic-form distance: {bins} bins (limit {limit})")]
    SpectrumTooLarge { bins: usize, limit: usize },

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
