use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("model has no exemplars")]
    EmptyModel,
    #[error("cannot sample from an empty candidate list")]
    EmptyCandidates,
    #[error("stream must contain at least one element")]
    EmptyStream,
    #[error("position {position} out of range for {len} exemplars")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid value for `{key}`: {reason}")]
    InvalidConfig { key: &'static str, reason: String },
    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
}

pub type Result<T> = std::result::Result<T, Error>;
