use thiserror::Error;

/// Errors raised by tree construction, flow solving and geodesic maintenance.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("newick syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("duplicate leaf name `{0}`")]
    DuplicateLeaf(String),

    #[error("unknown leaf name `{0}`")]
    UnknownLeaf(String),

    #[error("edge above `{0}` has no branch length")]
    MissingLength(String),

    #[error("non-positive branch length {0}")]
    NonPositiveLength(f64),

    #[error("label set mismatch: expected {expected} labels, found {found}")]
    LabelMismatch { expected: usize, found: usize },

    #[error("invalid label set: {0}")]
    InvalidLabels(String),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("lambda {0} outside [0, 1]")]
    LambdaOutOfRange(f64),

    #[error("segment endpoints must share one orthant: {0}")]
    OrthantMismatch(String),

    #[error("invalid support sequence: {0}")]
    InvalidSupports(String),

    #[error("numerical inconsistency: {0}")]
    Numerical(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("sweep exceeded the event cap of {0}")]
    EventCap(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
