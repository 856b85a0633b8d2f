use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedToken(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {expected:?}, found {found:?}")]
    Expected { expected: char, found: char },
    #[error("malformed number {0:?}")]
    BadNumber(String),
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
    #[error("{name} takes {expected} argument(s), got {found}")]
    Arity { name: String, expected: &'static str, found: usize },
    #[error("empty interval [{lo}, {hi})")]
    EmptyInterval { lo: f64, hi: f64 },
    #[error("piecewise intervals must be contiguous and cover the real line")]
    PiecewiseCoverage,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("pole at x = {x}")]
    Pole { x: f64 },
    #[error("expression undefined at x = {x}")]
    Undefined { x: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("no convergence after {intervals} subintervals: value {value}, error {error}")]
    NoConvergence { value: f64, error: f64, intervals: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("coefficient {name}: {source}")]
    Parse { name: &'static str, source: ParseError },
    #[error("malformed problem file: {0}")]
    Json(String),
    #[error("compact interval needs a < b, got [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
    #[error("unknown tail declaration {0:?} (expected q, 1/p or 1/r)")]
    UnknownTail(String),
    #[error("declared tail of {name} holds at only {fraction:.3} of sample points")]
    TailViolated { name: String, fraction: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("grid needs at least 2 cells, got {0}")]
    GridTooSmall(usize),
    #[error("truncation half-length must be positive, got {0}")]
    BadLength(f64),
    #[error("coefficient {name} failed at node x = {x}: {source}")]
    Coefficient { name: &'static str, x: f64, source: EvalError },
    #[error("pivot breakdown in Sturm count near lambda = {0}")]
    PivotBreakdown(f64),
    #[error("refinement ladder exhausted after {steps} solves without convergence")]
    Exhausted { steps: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid exponent {0:?}")]
    InvalidExponent(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
