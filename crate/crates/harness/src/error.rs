use thiserror::Error;

/// Failures of a harness run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("property check failed: {0}")]
    Property(String),

    #[error("small divisor at word {word}: |divisor| = {magnitude:e}")]
    SmallDivisor { word: String, magnitude: f64 },

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) | HarnessError::Io { .. } => 1,
            HarnessError::Property(_) => 2,
            HarnessError::SmallDivisor { .. } => 3,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.display().to_string(), source }
    }
}

impl From<wordseries_core::Error> for HarnessError {
    fn from(e: wordseries_core::Error) -> Self {
        match e {
            wordseries_core::Error::SmallDivisor { word, magnitude } => HarnessError::SmallDivisor { word, magnitude },
            other => HarnessError::Validation(other.to_string()),
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
