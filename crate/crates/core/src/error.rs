use thiserror::Error;

use crate::instance::Violation;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the toolkit. Validation problems that are data rather
/// than failures are reported as [`Violation`] lists instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("format error at line {line}, column {column}: {message}")]
    Format {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("instance has no heroes")]
    EmptyInstance,

    #[error("duplicate hero name `{0}`")]
    DuplicateHero(String),

    #[error("unknown alliance `{0}`")]
    UnknownAlliance(String),

    #[error("unknown hero `{0}`")]
    UnknownHero(String),

    #[error("negative bonus {value} for alliance `{alliance}`")]
    NegativeBonus { alliance: String, value: f64 },

    #[error("instance violates {} invariant(s): {}", .0.len(), join_violations(.0))]
    InvalidInstance(Vec<Violation>),

    #[error("team of {size} heroes exceeds the cap of {cap}")]
    TeamTooLarge { size: usize, cap: usize },

    #[error("assignment is missing variable `{0}`")]
    IncompleteAssignment(String),

    #[error("operation not applicable: {0}")]
    NotApplicable(String),

    #[error("search space too large: {0}")]
    TooLarge(String),

    #[error("invalid branch: {0}")]
    InvalidBranch(String),

    #[error("subgraph size k={k} is invalid for a graph with {vertices} vertices")]
    InvalidK { k: usize, vertices: usize },

    #[error("reduction needs at least {cap} heroes, instance has {heroes}")]
    NotEnoughHeroes { heroes: usize, cap: usize },

    #[error("team cap {0} is degenerate for the clique reduction (need at least 2)")]
    DegenerateCap(usize),

    #[error("instance is not in pair form: {0}")]
    NotPairForm(String),

    #[error("instance is not in uniform size-{q} form: {reason}")]
    NotUniformForm { q: usize, reason: String },

    #[error("clique is inconsistent: {0}")]
    InconsistentClique(String),

    #[error("clique does not match the graph: {0}")]
    LabelMismatch(String),

    #[error("graph has a negative edge weight between {0} and {1}")]
    NegativeWeight(usize, usize),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub(crate) fn format(message: impl Into<String>) -> Self {
        Error::Format {
            line: 0,
            column: 0,
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
