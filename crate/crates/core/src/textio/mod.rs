//! Text formats: formulas, model files, assignment files and reports.

mod assignment;
mod formula;
mod lexer;
mod model;
mod report;

use std::fmt;

use thiserror::Error;

pub use assignment::{parse_assignment, render_assignment, AssignmentFile};
pub use formula::{parse_formula, render_formula, FormulaEnv};
pub use model::{
    parse_discount_expr, parse_model, render_model, DiscountDecl, DiscountExpr, ModelError,
    ModelFile,
};
pub use report::Report;

/// A syntax error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    /// Moves a position relative to an embedded fragment into the
    /// enclosing text, where the fragment starts at `line`:`col`.
    pub(crate) fn offset(mut self, line: usize, col: usize) -> Self {
        if self.line == 1 {
            self.col += col - 1;
        }
        self.line += line - 1;
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}
