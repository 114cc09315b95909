use thiserror::Error;

use crate::graph::AgentId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("self-loop rejected on agent {0}")]
    SelfLoop(AgentId),

    #[error("graph has no edges")]
    NoEdges,

    #[error("agent {0} is solvent, no avalanche triggered")]
    NotTriggered(AgentId),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("truncated tail {tail:e} exceeds tolerance {tolerance:e}")]
    Truncation { tail: f64, tolerance: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("values have no variance")]
    NoVariance,
}
