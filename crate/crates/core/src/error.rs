use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("pole of {what} at {at}")]
    Pole { what: &'static str, at: String },
    #[error("point {0} outside the evaluation envelope")]
    OutOfEnvelope(String),
    #[error("evaluation point lies {distance:.3e} from a zero (guard {guard:.1e})")]
    NearZero { distance: f64, guard: f64 },
    #[error("limit {requested} exceeds configured cap {cap}")]
    CapExceeded { requested: u64, cap: u64 },
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
