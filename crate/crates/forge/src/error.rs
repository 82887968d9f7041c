use thiserror::Error;

/// Everything that maps to exit code 2: the run never got to a verdict.
#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot build {name}: {source}")]
    Build {
        name: String,
        #[source]
        source: albert_core::Error,
    },
    #[error("{0}")]
    Io(String),
}

impl ForgeError {
    pub fn build(name: &str, source: albert_core::Error) -> Self {
        ForgeError::Build {
            name: name.to_string(),
            source,
        }
    }
}
