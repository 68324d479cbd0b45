use std::fmt;

use thiserror::Error;

/// Location of a parse failure in the KB source (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    NegatedComplexConcept,
    KindConflict {
        name: String,
        declared: String,
        used_as: String,
    },
    Reserved(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::ArityMismatch {
                predicate,
                expected,
                found,
            } => write!(
                f,
                "arity mismatch: `{predicate}` expects {expected} argument(s), found {found}"
            ),
            ParseErrorKind::NegatedComplexConcept => {
                write!(f, "`not` may only be applied to an atomic concept")
            }
            ParseErrorKind::KindConflict {
                name,
                declared,
                used_as,
            } => write!(f, "`{name}` is a {declared} and cannot be used as a {used_as}"),
            ParseErrorKind::Reserved(name) => write!(f, "`{name}` is a reserved name"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Position,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn new(line: usize, col: usize, kind: ParseErrorKind) -> Self {
        ParseError {
            pos: Position { line, col },
            kind,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unsupported axiom: {0}")]
    UnsupportedAxiom(String),
    #[error("knowledge base is inconsistent")]
    InconsistentKb,
    #[error("live chase branches exceeded the limit of {0}")]
    BranchLimitExceeded(usize),
    #[error("reference concept `{0}` has no cautious instances")]
    EmptyReferenceConcept(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
