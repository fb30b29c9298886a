use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A value lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("format error in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("class id {class_id} is not covered by the class-collapse rule")]
    ClassMap { class_id: u16 },

    #[error("manifest error{}: {reason}", sample.as_ref().map(|s| format!(" (sample `{s}`)")).unwrap_or_default())]
    Manifest {
        sample: Option<String>,
        reason: String,
    },

    #[error("backend error for key `{key}`: {reason}")]
    Backend { key: String, reason: String },

    #[error("aggregation error: {0}")]
    Aggregation(String),

    /// Fewer than two pixels available to an affine fit.
    #[error("insufficient support: {usable} usable pixel(s), at least 2 required")]
    InsufficientSupport { usable: usize },

    /// The prediction is constant over the fit support.
    #[error("degenerate fit: prediction has zero variance over {usable} pixel(s)")]
    DegenerateFit { usable: usize },

    #[error("empty split: no evaluated pixels")]
    EmptySplit,

    #[error("I/O error on {path}: {source}")]
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

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn backend(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Backend {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Prefixes the message of a backend or aggregation error with extra context.
    pub fn context(self, ctx: &str) -> Self {
        match self {
            Error::Backend { key, reason } => Error::Backend {
                key,
                reason: format!("{ctx}: {reason}"),
            },
            Error::Aggregation(reason) => Error::Aggregation(format!("{ctx}: {reason}")),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
