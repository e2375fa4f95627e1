use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set size {0} is outside 1..=64")]
    GroundSetSize(usize),

    #[error("invalid subset: {0}")]
    InvalidSubset(String),

    #[error("rank {rank} out of range: C({n},{k}) = {limit}")]
    RankOutOfRange { rank: u64, n: usize, k: usize, limit: u64 },

    #[error("k = {k} does not divide n = {n}")]
    NotDivisible { n: usize, k: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource bound exceeded: {0}")]
    Resource(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl Error {
    /// Short machine-readable tag, used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::GroundSetSize(_) => "ground_set",
            Error::InvalidSubset(_) => "invalid_subset",
            Error::RankOutOfRange { .. } => "range",
            Error::NotDivisible { .. } => "divisibility",
            Error::Domain(_) => "domain",
            Error::Resource(_) => "resource",
            Error::Precondition(_) => "precondition",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
