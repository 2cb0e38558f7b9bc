use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid set notation `{input}`: {reason}")]
    SetNotation { input: String, reason: String },

    #[error("invalid periodic set: {0}")]
    InvalidSet(String),

    #[error("hypothesis `{0}` has finite support (UUS requires an infinite support)")]
    FiniteSupport(String),

    #[error("duplicate hypothesis id `{0}`")]
    DuplicateHypothesis(String),

    #[error("hypothesis index {index} is out of range")]
    NoSuchHypothesis { index: usize },

    #[error("no examples")]
    NoExamples,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid rational `{0}`: expected `num/den`")]
    InvalidRational(String),

    #[error("invalid group collection: {0}")]
    InvalidGroups(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("tuple contains duplicate element {0}")]
    DuplicateElement(u64),

    #[error("witness rejected: {0}")]
    WitnessRejected(String),

    #[error("dimension search insufficient: {0}")]
    SearchInsufficient(String),

    #[error("query budget of {budget} exceeded within one step")]
    QueryBudgetExceeded { budget: u64 },

    #[error("generator failed at step {step}: {source}")]
    GeneratorFailed { step: usize, source: Box<Error> },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("scenario error at `{path}`: {message}")]
    Scenario { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Whether the error stems from the inputs rather than from a broken
    /// invariant.
    pub fn is_configuration(&self) -> bool {
        match self {
            Error::Invariant(_) => false,
            Error::GeneratorFailed { source, .. } => source.is_configuration(),
            _ => true,
        }
    }

    pub(crate) fn scenario(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scenario {
            path: path.into(),
            message: message.into(),
        }
    }
}
