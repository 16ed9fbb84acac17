use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("n = {index}: {msg}")]
    Domain { index: usize, msg: String },
    #[error("linear system for the window ending at n = {top} is singular")]
    SingularWindow { top: usize },
    #[error("value at n = {index} overflows f64; use the log form")]
    Overflow { index: usize },
    #[error("need at least {needed} terms, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("approximant system has a {nullity}-dimensional solution space")]
    DegenerateSystem { nullity: usize },
    #[error("approximant needs {needed} coefficients, got {got}")]
    InsufficientCoefficients { needed: usize, got: usize },
    #[error("leading polynomial has no positive real root")]
    NoPhysicalRoot,
    #[error("root at {0} is not simple")]
    MultipleRoot(f64),
}
