use thiserror::Error;

use crate::io::DocumentError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line direction has zero length")]
    ZeroDirection,

    #[error("mesh of part `{0}` is empty")]
    EmptyMesh(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid feature: {0}")]
    InvalidFeature(String),

    #[error("invalid assembly: {0}")]
    InvalidAssembly(String),

    #[error("unknown part `{0}`")]
    UnknownPart(String),

    #[error("parts `{0}` and `{1}` are not connected by any chain of mates")]
    Disconnected(String, String),

    #[error("at least {required} transform samples are required, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error("label set is empty")]
    EmptyLabels,

    #[error("parts `{0}` and `{1}` share no candidate axis")]
    NoSharedAxes(String, String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Document(#[from] DocumentError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
