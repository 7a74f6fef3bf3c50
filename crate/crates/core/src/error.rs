use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("denominator is not a unit at t = 0: constant part is {0}")]
    NonUnitDenominator(String),

    #[error("representation is not nilpotent")]
    NotNilpotent,

    #[error("not homogeneous: generator {k} block ({tail},{head}) maps layer {from} into layer {to}")]
    NotHomogeneous {
        k: usize,
        tail: usize,
        head: usize,
        from: usize,
        to: usize,
    },

    #[error("invalid generators: {0}")]
    InvalidGenerators(String),

    #[error("lattice tuple is not maximal")]
    NotMaximal,

    #[error("refusing to enumerate {predicted} candidates (limit {ceiling}); raise the limit or lower the bound")]
    ResourceLimit { predicted: u128, ceiling: u128 },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
