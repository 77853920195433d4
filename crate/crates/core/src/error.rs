use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A byte that cannot be represented in the selected encoding.
    #[error("byte 0x{byte:02X} at position {position} is not 7-bit ASCII")]
    Encoding { position: usize, byte: u8 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("strategy exhausted")]
    ExhaustedStrategy,

    #[error("strategy too short: need {needed} terms, have {available}")]
    Depth { needed: usize, available: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("timing unavailable: {0}")]
    Environment(String),
}
