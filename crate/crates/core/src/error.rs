use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements live in different fields")]
    FieldMismatch,
    #[error("element involves variables outside the valuation pair: {0}")]
    OutsideValuationField(String),
    #[error("degenerate extension: {0}")]
    DegenerateExtension(String),
    #[error("algebra is not totally ramified: {0}")]
    NotTotallyRamified(String),
    #[error("w formula hypotheses fail: {0}")]
    LemmaInapplicable(String),
    #[error("characteristic {found} not supported here (need {expected})")]
    WrongCharacteristic { expected: String, found: u32 },
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("certificate error: {0}")]
    Certificate(String),
}
