use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("order exceeded: need {needed}, have {available}")]
    OrderExceeded { needed: usize, available: usize },
    #[error("missing smooth-function slot `{0}`")]
    MissingSlot(String),
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("degenerate germ: {0}")]
    DegenerateGerm(String),
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    #[error("candidate does not match the ansatz: {0}")]
    AnsatzMismatch(String),
    #[error("no generic sample found after {0} attempts")]
    DegenerateSample(usize),
    #[error("bad initial data: {0}")]
    BadInitialData(String),
    #[error("step size underflow at lambda = {0}")]
    StepUnderflow(f64),
    #[error("lambda = {0} outside the tabulated range")]
    RangeExceeded(f64),
    #[error("blow-up at step {0}")]
    BlowUp(usize),
    #[error("CFL violation: dt = {dt}, limit = {limit}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("initial field is not periodic: {0}")]
    NonPeriodicInit(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::OrderExceeded { .. } => "OrderExceeded",
            Error::MissingSlot(_) => "MissingSlot",
            Error::ConstraintViolated(_) => "ConstraintViolated",
            Error::DegenerateGerm(_) => "DegenerateGerm",
            Error::RegimeMismatch(_) => "RegimeMismatch",
            Error::AnsatzMismatch(_) => "AnsatzMismatch",
            Error::DegenerateSample(_) => "DegenerateSample",
            Error::BadInitialData(_) => "BadInitialData",
            Error::StepUnderflow(_) => "StepUnderflow",
            Error::RangeExceeded(_) => "RangeExceeded",
            Error::BlowUp(_) => "BlowUp",
            Error::CflViolation { .. } => "CflViolation",
            Error::NonPeriodicInit(_) => "NonPeriodicInit",
            Error::Parse { .. } => "ParseError",
            Error::UnknownId(_) => "UnknownId",
            Error::Invalid(_) => "InvalidInput",
        }
    }
}
