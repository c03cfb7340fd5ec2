use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] cefai_core::Error),
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const INVALID_CE: i32 = 2;
    pub const NOT_GENERIC: i32 = 3;
    pub const UNSUPPORTED: i32 = 4;
    pub const PARSE: i32 = 5;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => exit::PARSE,
            CliError::Core(cefai_core::Error::NotGeneric(_)) => exit::NOT_GENERIC,
            CliError::Core(cefai_core::Error::UnsupportedCase { .. }) => exit::UNSUPPORTED,
            _ => exit::FAILURE,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "ParseError",
            CliError::Io { .. } => "IoError",
            CliError::Usage(_) => "UsageError",
            CliError::Core(e) => match e {
                cefai_core::Error::NotGeneric(_) => "NotGeneric",
                cefai_core::Error::UnsupportedCase { .. } => "UnsupportedCase",
                cefai_core::Error::InstanceTooLarge { .. } => "InstanceTooLarge",
                cefai_core::Error::DimensionMismatch(_) => "DimensionMismatch",
                cefai_core::Error::NoValidSpe => "NoValidSpe",
                _ => "CoreError",
            },
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}
