//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed textual input; `pos` is a 1-based column within the line.
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    /// "bot" used where a fresh identifier is required.
    #[error("reserved name `{0}` cannot be bound")]
    ReservedName(String),

    /// A rule label position holds a non-atomic formula.
    #[error("non-atomic label in rule: {0}")]
    NonAtomic(String),

    /// A declared level bound is exceeded.
    #[error("level bound {bound} exceeded by rule of level {level}: {rule}")]
    LevelBound {
        bound: usize,
        level: usize,
        rule: String,
    },

    /// A base or formula refers outside the ambient universe.
    #[error("universe mismatch: {0}")]
    UniverseMismatch(String),

    /// Assumed rules must be disjoint from the base.
    #[error("assumed rules overlap the base: {0}")]
    Overlap(String),

    /// A derivation tree violates the derivation rules.
    #[error("ill-formed derivation at node `{node}`: {msg}")]
    IllFormedDerivation { node: String, msg: String },

    /// A rule is used outside the subtree where it is discharged.
    #[error("discharge out of scope at node `{node}`: {msg}")]
    DischargeScope { node: String, msg: String },

    /// Substituted structure concludes the wrong formula.
    #[error("conclusion mismatch: expected `{expected}`, got `{got}`")]
    ConclusionMismatch { expected: String, got: String },

    /// A reduction output broke the reduction contract.
    #[error("reduction contract violated by `{reduction}`: {msg}")]
    ContractViolation { reduction: String, msg: String },

    /// Witness synthesis requested for an underivable sequent.
    #[error("not derivable: {0}")]
    NotDerivable(String),

    /// Ill-formed argument structure.
    #[error("ill-formed argument structure: {0}")]
    IllFormedStructure(String),

    /// File-level problems surfaced by loaders.
    #[error("{path}:{line}: {source}")]
    InFile {
        path: String,
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        Error::Syntax {
            pos,
            msg: msg.into(),
        }
    }

    pub fn in_file(self, path: &str, line: usize) -> Self {
        Error::InFile {
            path: path.to_string(),
            line,
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
