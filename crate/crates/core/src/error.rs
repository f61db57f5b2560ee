use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter {name} = {value} is outside (0, 1/16]")]
    OutOfRange { name: &'static str, value: String },

    #[error("exponent budget exceeded: {requested} > cap {cap}")]
    ExponentCap { requested: u64, cap: u32 },

    #[error("depth {requested} exceeds configured cap {cap}")]
    DepthCap { requested: u32, cap: u32 },

    #[error("cannot parse {0:?} as a rational number")]
    ParseRational(String),

    #[error("invalid letter {0}; letters are 1..=4")]
    BadLetter(u8),

    #[error("cannot parse address {0:?}")]
    ParseAddress(String),

    #[error("empty address")]
    EmptyAddress,

    #[error("address must be eventually periodic")]
    NotPeriodic,

    #[error("the point 0 has no alternating-sum representation")]
    NoRepresentation,

    #[error("invalid alternating-sum representation: {0}")]
    InvalidRep(String),

    #[error("precision {0} bits is below the minimum of 53")]
    Precision(u32),

    #[error("precision {0} bits is insufficient to certify the requested output")]
    InsufficientPrecision(u32),

    #[error("log p / log q is rational: p^{m} = q^{n}")]
    DegenerateRatio { m: u64, n: u64 },

    #[error("cover intervals are too coarse to resolve the window")]
    Unresolved,

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
