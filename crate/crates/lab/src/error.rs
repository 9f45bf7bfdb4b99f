use std::path::PathBuf;

/// Failures of the experiment runner.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    /// A configuration value is out of range; `field` is a dotted path
    /// into the configuration document.
    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: String, reason: String },
    #[error(transparent)]
    Core(#[from] radwave_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

pub type LabResult<T> = Result<T, LabError>;

impl LabError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        LabError::InvalidArgument {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| LabError::Io { path, source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> Self {
        let path = path.into();
        move |source| LabError::Csv { path, source }
    }

    pub(crate) fn json(path: impl Into<PathBuf>) -> impl FnOnce(serde_json::Error) -> Self {
        let path = path.into();
        move |source| LabError::Json { path, source }
    }

    /// Rewrites a core argument error so its field names a configuration path.
    pub(crate) fn in_config(err: radwave_core::Error, prefix: &str) -> Self {
        match err {
            radwave_core::Error::InvalidArgument { field, reason } => LabError::InvalidArgument {
                field: if prefix.is_empty() {
                    field.to_string()
                } else {
                    format!("{prefix}.{field}")
                },
                reason,
            },
            other => LabError::Core(other),
        }
    }
}
