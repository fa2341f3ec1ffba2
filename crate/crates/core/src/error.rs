use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid walk configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid path pair: {0}")]
    InvalidPair(String),

    #[error("generator b_{index} out of range for {strands} strands (t too large for n?)")]
    GeneratorOutOfRange { index: i64, strands: usize },

    #[error("unsupported link: {0}")]
    UnsupportedLink(String),

    /// The Milnor sign product did not collapse to +-1.
    #[error("sub-braid product is not +-identity for components ({r}, {s}): link not proper or components misindexed")]
    NotProperOrMisindexed { r: usize, s: usize },

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("{what}: requested {requested} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the CLI: 2 validation, 3 cap exceeded, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_)
            | Error::InvalidPair(_)
            | Error::GeneratorOutOfRange { .. }
            | Error::InvalidArgument(_) => 2,
            Error::CapExceeded { .. } => 3,
            _ => 1,
        }
    }
}
