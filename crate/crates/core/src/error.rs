//! Crate-wide error type with stable machine-readable codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scalar: {0}")]
    InvalidScalar(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("mismatched index sets in convex mixture: {0}")]
    MixtureShape(String),

    #[error("invalid simplex: {0}")]
    InvalidSimplex(String),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("invalid complex map: {0}")]
    InvalidMap(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("invalid empirical model: {0}")]
    InvalidModel(String),

    #[error("not a bundle scenario: {0}")]
    NotBundle(String),

    #[error("invalid simplicial set: {0}")]
    InvalidSSet(String),

    #[error("invalid simplicial distribution: {0}")]
    InvalidSDist(String),

    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),

    #[error("no decision procedure for this semiring: {0}")]
    UndecidableSemiring(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable code for machine consumption in CLI reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidScalar(_) => "E_SCALAR",
            Error::InvalidDistribution(_) => "E_DIST",
            Error::MixtureShape(_) => "E_MIX_SHAPE",
            Error::InvalidSimplex(_) => "E_SIMPLEX",
            Error::InvalidComplex(_) => "E_COMPLEX",
            Error::InvalidMap(_) => "E_MAP",
            Error::InvalidScenario(_) => "E_SCENARIO",
            Error::InvalidMorphism(_) => "E_MORPHISM",
            Error::InvalidModel(_) => "E_MODEL",
            Error::NotBundle(_) => "E_NOT_BUNDLE",
            Error::InvalidSSet(_) => "E_SSET",
            Error::InvalidSDist(_) => "E_SDIST",
            Error::CapExceeded(_) => "E_CAP",
            Error::UndecidableSemiring(_) => "E_SEMIRING",
            Error::Parse { .. } => "E_PARSE",
            Error::Io(_) => "E_IO",
        }
    }

    /// Process exit status mandated for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
