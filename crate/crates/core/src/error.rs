use thiserror::Error;

/// Errors produced by the coding, protocol and timing layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no inverse: zero is not invertible")]
    NoInverse,

    #[error("insufficient points: requested {requested}, only {available} admissible elements")]
    InsufficientPoints { requested: u128, available: u128 },

    #[error("singular system: evaluation points are not pairwise distinct")]
    SingularSystem,

    #[error("shape error: {0}")]
    Shape(String),

    #[error("partition error: {len} is not divisible into {parts} blocks")]
    Partition { len: usize, parts: usize },

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("insufficient results: group {group} returned {have} of the {need} required")]
    Insufficient { group: usize, have: usize, need: usize },

    #[error("noise term mismatch for row block {block}")]
    NoiseMismatch { block: usize },

    #[error("divergent: log convention undefined for order statistic {k} of {n}")]
    Divergent { n: usize, k: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
