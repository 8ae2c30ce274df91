//! Text format for coordinate charts and a jet evaluator for its expressions.
//!
//! ```text
//! chart flat2
//! coords x y
//! metric
//!   g[0,0] = 1
//!   g[1,1] = 1
//! end
//! ```
//!
//! Directives: `chart`, `coords`, `params`, `scalar`, `domain` (`;`-separated
//! strict `> 0` constraints), `sample <coord> = (lo, hi)` or
//! `sample polar <x> <y> = (rlo, rhi)`, `metric` with
//! `g[i,j] = expr` lines, `form <name>` with `w[i,j] = expr` lines,
//! `vector <name> = (..)`, `distribution <name> = X, J X`,
//! `killing <vector> [<potential scalar>]`, `lee <form> <scalar>`,
//! `calabi <+|-> <scalar>`, `end`. Names must be declared before use.

mod ast;
mod eval;
mod lexer;
mod parser;
mod printer;

use thiserror::Error;

pub use ast::*;
pub use eval::{eval_expr, PointEval};
pub use parser::parse_chart;
pub use printer::{print_chart, print_expr};

use crate::jet::JetError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownIdentifier(String),
    Dimension(String),
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {}", describe(.kind))]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::Syntax(m) => m.clone(),
        ParseErrorKind::UnknownIdentifier(n) => format!("unknown identifier `{n}`"),
        ParseErrorKind::Dimension(m) => format!("dimension mismatch: {m}"),
        ParseErrorKind::Duplicate(n) => format!("duplicate declaration `{n}`"),
    }
}

impl ParseError {
    pub(crate) fn new(line: usize, col: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, col, kind }
    }

    pub(crate) fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError::new(line, col, ParseErrorKind::Syntax(msg.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("point violates domain constraint #{constraint} (value {value:e})")]
    Domain { constraint: usize, value: f64 },
    #[error("point has {got} coordinates, chart has {expected}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Jet(#[from] JetError),
}
