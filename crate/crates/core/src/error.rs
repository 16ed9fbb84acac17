use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("signature has no values left to place")]
    EmptySignature,
    #[error("placement does not name an available value")]
    InvalidPlacement,
    #[error("prefix value {0} is blocked: it completes a 1324 pattern")]
    BlockedPrefix(u32),
    #[error("prefix value {0} is out of range or repeated")]
    InvalidPrefixValue(u32),
    #[error("problem size {0} exceeds 63")]
    TooLarge(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("signature does not fit the 128-bit key: {0}")]
    EncodingOverflow(String),
    #[error("malformed key: {0}")]
    MalformedKey(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("maximum n {0} exceeds 63")]
    TooLarge(u32),
    #[error("modulus {0} is not an odd prime below 2^62")]
    BadModulus(u64),
    #[error("the given primes cannot certify coefficients up to n = {max_n}")]
    InsufficientPrimes { max_n: u32 },
    #[error("prime {0} is used by more than one run")]
    ModulusClash(u64),
    #[error("runs disagree on the maximum n ({0} vs {1})")]
    LengthMismatch(u32, u32),
    #[error("product of primes does not exceed the coefficient bound at n = {max_n}")]
    BoundExceeded { max_n: u32 },
    #[error("check modulo {prime} failed at n = {n}: expected {expected}, found {found}")]
    CheckFailed {
        n: u32,
        prime: u64,
        expected: u64,
        found: u64,
    },
    #[error("at least two runs are required for reconstruction")]
    TooFewRuns,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("brute force is limited to n <= {limit}, got {n}")]
    SizeTooLarge { n: usize, limit: usize },
    #[error("pattern must be a permutation of 1..k with k >= 2")]
    InvalidPattern,
    #[error("asymptotic form needs positive B, mu and mu1")]
    DomainError,
}
