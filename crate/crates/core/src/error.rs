use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("division by an enclosure that contains zero")]
    DivisionByUncertainZero,
    #[error("precision cap of {cap} bits exceeded: {context}")]
    PrecisionCapExceeded { cap: u32, context: String },
    #[error("ambiguous rounding: enclosure [{lo}, {hi}] straddles a rounding boundary")]
    AmbiguousRounding { lo: String, hi: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("modulus of the evaluation point does not certainly exceed 1")]
    ModulusNotAboveOne,
    #[error("characteristic polynomial is not separable")]
    InseparableInput,
    #[error("linear system is ill-conditioned at the precision cap")]
    IllConditioned,
    #[error("search budget of {budget} steps exceeded")]
    SearchBudgetExceeded { budget: u64 },
    #[error("all rotation quotients are roots of unity")]
    AllRootsOfUnity,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("bases are multiplicatively dependent: ({u}, {v})")]
    DependentBases { u: i64, v: i64 },
    #[error("construction depth insufficient: {0}")]
    DepthInsufficient(String),
    #[error("linear form is exactly zero")]
    LambdaZero,
    #[error("missing asymptotic data: {0}")]
    MissingBinetData(String),
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("root isolation failed: {0}")]
    IsolationError(String),
}

impl Error {
    pub fn cap(cap: u32, context: impl Into<String>) -> Self {
        Error::PrecisionCapExceeded {
            cap,
            context: context.into(),
        }
    }

    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Precision-type failures the caller can retry with a larger cap.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::PrecisionCapExceeded { .. } | Error::AmbiguousRounding { .. } | Error::IllConditioned
        )
    }

    /// Malformed input rather than a numeric failure.
    pub fn is_invalid_spec(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpec(_)
                | Error::Schema { .. }
                | Error::IsolationError(_)
                | Error::InvalidInput(_)
                | Error::LengthMismatch { .. }
        )
    }
}
