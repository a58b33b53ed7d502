use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),

    #[error("edge endpoint `{id}` at line {line} names no vertex")]
    UnknownEndpoint { id: String, line: usize },

    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),

    #[error("repeated edge `{0}`–`{1}`")]
    RepeatedEdge(String, String),

    #[error("edge `{0}`–`{1}` closes a cycle")]
    Cycle(String, String),

    #[error("invalid graph JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("intersection form is not negative definite")]
    NotNegativeDefinite,

    #[error("intersection form is degenerate (det = 0)")]
    Degenerate,

    #[error("enumeration needs {needed} items, budget is {budget}")]
    Budget { needed: u128, budget: u64 },

    #[error("path algorithm exceeded its safety limit of {0} steps")]
    SafetyLimit(u64),

    #[error("vector {0:?} is not a characteristic vector of this form")]
    NotCharacteristic(Vec<i64>),

    #[error("vector {0:?} lies outside the characteristic box")]
    OutsideBox(Vec<i64>),

    #[error("vectors lie in different spin^c classes")]
    NotSameClass,

    #[error("no relation path inside the box expanded by {0}")]
    BoundExceeded(u32),

    #[error("graded table did not converge (max U = {max_u}, expansion = {expansion})")]
    Unconverged { max_u: u32, expansion: u32 },

    #[error("integer overflow in exact arithmetic fast path")]
    Overflow,

    #[error("invalid lens space parameters p = {p}, q = {q}, i = {i}")]
    InvalidLens { p: i64, q: i64, i: i64 },

    #[error("vertex index {0} out of range")]
    NoSuchVertex(usize),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
