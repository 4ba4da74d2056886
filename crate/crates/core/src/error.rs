use std::fmt;

use crate::reader::ParseError;
use crate::term::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    TypeError,
    InstantiationError,
    ArithError,
    MailboxEmpty,
    UnknownPredicate,
    /// An engine was asked to run while it is already running.
    EngineBusy,
    /// A thread tried to join itself.
    Deadlock,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::TypeError => "type_error",
            ErrorKind::InstantiationError => "instantiation_error",
            ErrorKind::ArithError => "arith_error",
            ErrorKind::MailboxEmpty => "mailbox_empty",
            ErrorKind::UnknownPredicate => "unknown_predicate",
            ErrorKind::EngineBusy => "engine_busy",
            ErrorKind::Deadlock => "deadlock",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fault raised by a builtin while an engine runs. It kills the engine.
#[derive(Clone, Debug, thiserror::Error)]
pub struct MachineError {
    pub kind: ErrorKind,
    pub culprit: Term,
    pub detail: String,
}

impl MachineError {
    pub fn new(kind: ErrorKind, culprit: Term, detail: impl Into<String>) -> Self {
        MachineError {
            kind,
            culprit,
            detail: detail.into(),
        }
    }

    pub fn type_error(expected: &str, culprit: Term) -> Self {
        MachineError::new(
            ErrorKind::TypeError,
            culprit,
            format!("{expected} expected"),
        )
    }

    pub fn instantiation(culprit: Term) -> Self {
        MachineError::new(
            ErrorKind::InstantiationError,
            culprit,
            "argument is not sufficiently instantiated",
        )
    }

    pub fn arith(culprit: Term, detail: &str) -> Self {
        MachineError::new(ErrorKind::ArithError, culprit, detail)
    }
}

impl fmt::Display for MachineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} (culprit: {})",
            self.kind, self.detail, self.culprit
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{file}:{error}")]
    ParseIn { file: String, error: ParseError },
    #[error("{origin}: cannot define builtin {name}/{arity}")]
    Builtin {
        name: String,
        arity: usize,
        origin: String,
    },
    #[error("{origin}: body goal {goal} is not callable")]
    NotCallable { goal: String, origin: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Machine(#[from] MachineError),
}
