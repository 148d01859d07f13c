//! Error types shared across the pipeline.

use thiserror::Error;

/// Position of a token in the source text, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Syntax or well-formedness error in an input script.
#[derive(Debug, Clone, Error)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> Self {
        ParseError { pos, msg: msg.into() }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("sort error: {0}")]
    Sort(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("integer variable `{0}` assigned non-integer value")]
    NonIntegerValue(String),

    #[error("nonlinear term: {0}")]
    Nonlinear(String),

    #[error("floor is only allowed in mixed-domain input")]
    FloorNotAllowed,

    #[error("negation above a quantifier: input is not in the existential fragment")]
    NotExistential,

    #[error("modulo atom is illegal over the reals")]
    ModAtomOverReal,

    #[error("ramsey binder not eliminated")]
    ResidualRamsey,

    #[error("variable `{0}` outside the x/y/parameter partition")]
    OutsidePartition(String),

    #[error("{0}")]
    Unsupported(String),

    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Failures talking to the external SMT solver.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("cannot launch solver `{program}`: {source}")]
    Launch {
        program: String,
        source: std::io::Error,
    },

    #[error("solver i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("solver exited with status {status}: {stderr}")]
    Exit { status: i32, stderr: String },

    #[error("malformed solver output: {0}")]
    Malformed(String),

    #[error("solver model fails re-verification: {0}")]
    ModelCheck(String),

    #[error("no SMT solver found; install z3, set RAMSEY_SOLVER, or set up tools/z3-wasm")]
    NotFound,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
