use thiserror::Error;

/// Errors raised by the analysis routines.
///
/// Parse errors and precondition violations are kept apart so the CLI can map
/// them onto distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty word is not allowed here")]
    EmptyWord,

    #[error("word is not primitive: {0}")]
    NotPrimitive(String),

    #[error("substitution is not growing (letter {0} has bounded images)")]
    NotGrowing(String),

    #[error("substitution is not of constant length")]
    NotConstantLength,

    #[error("letter {0} is not prolongable")]
    NotProlongable(String),

    #[error("unknown letter {0}")]
    UnknownLetter(String),

    #[error("bases {0} and {1} are multiplicatively dependent")]
    DependentBases(u64, u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step limit of {0} elementary expansions exceeded")]
    StepLimit(u64),

    #[error("prefix of length {given} does not certify all factors; {needed} letters are needed")]
    InsufficientPrefix { needed: usize, given: usize },
}

impl Error {
    /// True for errors that come from malformed input rather than from a
    /// violated mathematical precondition.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::UnknownLetter(_))
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
