//! Coefficient functions `p`, `q`, `r`, problem files and the standing
//! hypotheses on them.

mod expr;
mod hypothesis;
mod parser;
mod problem;

pub use expr::{BinOp, Expr, Func, Piece};
pub use hypothesis::{check_hypotheses, HypothesisReport, Verdict};
pub use parser::parse_expr;
pub use problem::{decompose_q, Problem, ProblemFile, TailDecay, TailDecls, TailFile};
