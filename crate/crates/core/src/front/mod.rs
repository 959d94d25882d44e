//! Concrete syntax: lexer, parser and pretty printer.

mod lexer;
mod parser;
mod pretty;

use std::fmt;

use crate::syntax::Span;

pub use lexer::{lex, Tok, Token};
pub use parser::{parse_program, parse_program_internal, parse_term, parse_type, Parser};
pub use pretty::{pretty_decl, pretty_program, pretty_term, pretty_type};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl ParseError {
    /// `file:line:col: ParseError: message`
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{}: ParseError: {}", self.span, self.message)
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

impl std::error::Error for ParseError {}
