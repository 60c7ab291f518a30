use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("track {track} out of range for arity {arity}")]
    TrackOutOfRange { track: usize, arity: usize },

    #[error("invalid track mapping: {0}")]
    InvalidTrackMap(String),

    #[error("operation requires a {expected}, got a {found}")]
    WrongKind { expected: &'static str, found: &'static str },

    #[error("parts overlap on input {witness}")]
    Overlap { witness: String },

    #[error("regex parse error at offset {offset}: {message}")]
    Regex { offset: usize, message: String },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("unknown automaton `{0}`")]
    UnknownAutomaton(String),

    #[error("`{name}` expects {expected} argument(s), got {found}")]
    CallArity { name: String, expected: usize, found: usize },

    #[error("formula has free variables: {0}")]
    FreeVariables(String),

    #[error("`{0}` is already defined")]
    Redefinition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("synthesis failed: {0}")]
    Synthesis(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("line {line}: {message}")]
    Script { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
