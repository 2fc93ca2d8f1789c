use thiserror::Error;

use crate::graph::Violation;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("invalid graph: {}", join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("vertex {id} out of range 1..={m}")]
    VertexOutOfRange { id: usize, m: usize },

    #[error("enumeration exceeded cap of {cap}")]
    CapExceeded { cap: usize },

    #[error("unsupported graph: {0}")]
    Unsupported(String),

    #[error("directed cycle detected")]
    Cycle,

    #[error("matrix is singular")]
    Singular,

    #[error("{0}")]
    BadQuery(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
