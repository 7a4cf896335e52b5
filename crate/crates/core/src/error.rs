use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("invalid character: {0}")]
    InvalidChar(String),
    #[error("witness requested for an empty predicate")]
    EmptyPredicate,
    #[error("no representable value above {0}")]
    Overflow(String),
    #[error("invalid sample list: {0}")]
    InvalidSamples(String),
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("empty word where an output is required")]
    EmptyWord,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("table operation precondition violated: {0}")]
    Precondition(String),
    #[error("oracle assumption violated: {0}")]
    OracleAssumptionViolation(String),
    #[error("scripted counterexample rejected: {0}")]
    Script(String),
    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid benchmark spec: {0}")]
    InvalidSpec(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
