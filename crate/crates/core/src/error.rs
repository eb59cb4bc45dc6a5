use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("rank-deficient design for target {target} with neighbours {neighbours:?}")]
    RankDeficient {
        target: usize,
        neighbours: Vec<usize>,
    },

    #[error("birth-death chain for vertex {vertex} is stuck: {reason}")]
    ChainStuck { vertex: usize, reason: String },

    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
