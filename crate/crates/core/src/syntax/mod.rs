//! Concrete syntax: lexer, parser and pretty-printer.

pub mod ast;
mod lexer;
mod parser;
pub mod pretty;

use thiserror::Error;

pub use ast::{BinaryOp, Branch, Clause, DFormula, Expr, GoalStmt, SourceProgram, UnaryOp};
pub use lexer::is_keyword;
pub use parser::{
    parse_expr, parse_program, parse_program_with_info, CallSite, ParsedProgram, MAX_NESTING,
    MAX_SEQUENCE,
};
pub use pretty::{compact_clause, compact_dformula, compact_expr, compact_goal, pretty_print};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}
