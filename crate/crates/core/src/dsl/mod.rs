//! A small text language for declaring alphabets and automata and
//! combining them with `*` (parallel) and `;` (series).
//!
//! ```text
//! alphabet A = {eps, 0, 1}
//! automaton Flip : A -> {eps} {
//!     dim 2;
//!     basis {up, down};
//!     t(eps, eps) = [[1, 0], [0, 1]];
//!     t(0, eps) = {up -> down, down -> up};
//! }
//! let Both = Flip * Flip
//! let Twice = Flip ; id({eps})
//! ```

pub mod ast;
mod eval;
mod lexer;
mod parser;
mod print;

use std::fmt;

use thiserror::Error;

pub use ast::{Pos, Program, Span};
pub use eval::{EvalError, EvalErrorKind, Evaluator, Value};
pub use parser::{parse, parse_expr};

use crate::automaton::CAutomaton;

/// A lexing or parsing failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(pos: Pos, message: impl Into<String>) -> Self {
        Self { line: pos.line, col: pos.col, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

/// Evaluates the automaton bound to `name`.
pub fn evaluate(program: &Program, name: &str) -> Result<CAutomaton, EvalError> {
    Evaluator::new(program).automaton(name).map(|a| (*a).clone())
}

/// Parses and evaluates in one go; errors are rendered as `line:col: message`.
pub fn load(src: &str, name: &str) -> Result<CAutomaton, String> {
    let program = parse(src).map_err(|e| e.to_string())?;
    evaluate(&program, name).map_err(|e| e.to_string())
}
