//! Crate-wide error type.

use crate::boolexpr::VarId;
use crate::model::VarKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("variable {0} has no assigned value")]
    UnassignedVar(VarId),

    #[error("count constraints have no clausal form; encode them as a top-level conjunct")]
    CountInCnf,

    #[error("count constraint in an unsupported position: {0}")]
    CountPlacement(&'static str),

    #[error("CNF expansion exceeded the clause budget of {budget}")]
    ClauseBudget { budget: usize },

    #[error("variable registry is full")]
    RegistryFull,

    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },

    #[error("parse error on line {line}: {msg}")]
    ParseLine { line: usize, msg: String },

    #[error("duplicate variable name '{0}'")]
    DuplicateVar(String),

    #[error("variable names must be non-empty")]
    EmptyVarName,

    #[error("unknown variable {0}")]
    UnknownVar(VarId),

    #[error("unknown variable name '{0}'")]
    UnknownVarName(String),

    #[error("invalid bounds [{lower}, {upper}] for {kind:?} variable '{name}'")]
    InvalidBounds {
        name: String,
        kind: VarKind,
        lower: f64,
        upper: f64,
    },

    #[error("{what} must be finite, got {value}")]
    NonFinite { what: String, value: f64 },

    #[error("constraint tags must be non-empty")]
    EmptyTag,

    #[error("{0} requires at least one literal")]
    EmptyLiterals(&'static str),

    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },

    #[error("graph error: {0}")]
    Graph(String),

    #[error("graph is not connected")]
    DisconnectedGraph,

    #[error("no edge variable registered for ({i}, {j})")]
    MissingEdgeVar { i: usize, j: usize },

    #[error("instance too large: this routine accepts at most {limit} integer variables")]
    SizeCap { limit: usize },

    #[error("variable '{name}' has no finite lower bound")]
    UnboundedBelow { name: String },

    #[error("numerical failure in the solver: {0}")]
    Numerics(String),

    #[error("soft-constraint penalties must be positive and finite, got {0}")]
    BadPenalty(f64),

    #[error("{0}")]
    Invalid(String),
}
