use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("config key `{key}`: {reason}")]
    ConfigKey { key: String, reason: String },

    #[error(transparent)]
    Model(#[from] forcebound::Error),

    #[error("trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: forcebound::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl CliError {
    pub(crate) fn key(key: &str, reason: impl Into<String>) -> Self {
        Self::ConfigKey {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
