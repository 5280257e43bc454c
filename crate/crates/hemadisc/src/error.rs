use std::path::PathBuf;

use hemadisc_core::baselines::BaselineError;
use hemadisc_core::data::DataError;
use hemadisc_core::discriminator::DiscriminatorError;
use hemadisc_core::hs::HsError;
use hemadisc_core::metrics::MetricsError;
use hemadisc_core::pbis::PbisError;

use crate::cohort_csv::CsvError;
use crate::config::ConfigError;
use crate::model_file::ModelFileError;

/// Process exit status for each error family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Usage = 1,
    Data = 2,
    Numeric = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error(transparent)]
    Model(#[from] ModelFileError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Search(#[from] HsError),
    #[error(transparent)]
    Pbis(#[from] PbisError),
    #[error(transparent)]
    Discriminator(#[from] DiscriminatorError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn exit_kind(&self) -> ExitKind {
        match self {
            Error::Usage(_) | Error::Config(_) | Error::Search(_) | Error::Pbis(_) => ExitKind::Usage,
            Error::Data(e) => data_kind(e),
            Error::Discriminator(e) => match e {
                DiscriminatorError::EqualMeans { .. } | DiscriminatorError::DegenerateEvaluation => ExitKind::Numeric,
                DiscriminatorError::DuplicateInput(_) | DiscriminatorError::Search(_) => ExitKind::Usage,
                DiscriminatorError::Data(e) => data_kind(e),
                _ => ExitKind::Data,
            },
            Error::Io { .. } | Error::Csv(_) | Error::Model(_) | Error::Metrics(_) | Error::Baseline(_) => {
                ExitKind::Data
            }
        }
    }
}

fn data_kind(e: &DataError) -> ExitKind {
    match e {
        DataError::SplitTooLarge { .. } | DataError::EmptySplitPart | DataError::ZeroCount => ExitKind::Usage,
        _ => ExitKind::Data,
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
