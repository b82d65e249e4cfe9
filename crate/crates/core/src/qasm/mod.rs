//! OpenQASM 2.0 frontend: lexing, parsing, include resolution and semantic
//! checks. Everything here is a pure function of its inputs.

pub mod analyze;
pub mod ast;
pub mod expr;
pub mod include;
pub mod lexer;
pub mod parser;
pub mod printer;

use std::path::Path;

use thiserror::Error;

pub use analyze::analyze;
pub use ast::Program;
pub use expr::{Expr, ExprError};
pub use include::{resolve_includes, QELIB1};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, parse_expr};
pub use printer::print_program;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrontendError {
    #[error("{line}:{col}: {message}")]
    Lex { line: usize, col: usize, message: String },
    #[error("{line}:{col}: expected {expected}, found {found}")]
    Parse {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("{line}:{col}: {message}")]
    Semantic { line: usize, col: usize, message: String },
    #[error("{line}:{col}: included file '{path}' not found")]
    IncludeNotFound { path: String, line: usize, col: usize },
    #[error("{line}:{col}: include cycle through '{path}'")]
    IncludeCycle { path: String, line: usize, col: usize },
    #[error("in '{file}': {error}")]
    InFile { file: String, error: Box<FrontendError> },
}

impl FrontendError {
    /// `(line, col)` of the error in the file it was reported for.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            FrontendError::Lex { line, col, .. }
            | FrontendError::Parse { line, col, .. }
            | FrontendError::Semantic { line, col, .. }
            | FrontendError::IncludeNotFound { line, col, .. }
            | FrontendError::IncludeCycle { line, col, .. } => Some((*line, *col)),
            FrontendError::InFile { error, .. } => error.position(),
        }
    }
}

/// Tokenizes and parses, without resolving includes.
pub fn parse_source(source: &str) -> Result<Program, FrontendError> {
    parse(&tokenize(source)?)
}

/// Full frontend: parse, splice includes relative to `base_path`, analyze.
pub fn load_source(source: &str, base_path: &Path) -> Result<Program, FrontendError> {
    let program = resolve_includes(parse_source(source)?, base_path)?;
    analyze(&program)?;
    Ok(program)
}
