use thiserror::Error;

#[derive(Debug, Error)]
pub enum RfdaError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular problem: {0}")]
    Singular(String),

    #[error("bound not applicable: {0}")]
    BoundInapplicable(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, RfdaError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> RfdaError {
    RfdaError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
