use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, bad configuration or missing input files (exit code 2).
    #[error("{0}")]
    Usage(String),
    /// Data or computation failure (exit code 1).
    #[error(transparent)]
    Core(#[from] sentivol_core::Error),
    #[error("{0}")]
    Runtime(String),
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<CliError>,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Stage { source, .. } => source.exit_code(),
            _ => 1,
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::Runtime(format!("{}: {err}", path.display()))
    }
}
