use std::path::PathBuf;

use pss_core::chsim::ChError;
use pss_core::forms::FormsError;
use pss_core::geolab::GeoError;
use pss_core::symcore::SymError;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("missing file {}", .0.display())]
    Missing(PathBuf),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Ch(#[from] ChError),
    #[error(transparent)]
    Geo(#[from] GeoError),
}

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        LabError::Invalid(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
