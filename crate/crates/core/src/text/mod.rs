//! Concrete syntax: printing and parsing of terms, worlds, propositions,
//! sequents and goal files.

mod cert;
mod lex;
mod parse;
mod print;

use thiserror::Error;

pub use cert::{parse_certificate, write_certificate, Certificate};
pub(crate) use lex::Tok;
pub(crate) use parse::Parser;
pub use parse::{
    parse_goal_file, parse_judgement, parse_prop, parse_sequent, parse_term, parse_world, write_goal_file, GoalFile, NamedGoal,
};
pub use print::{write_prop, write_term, write_world, Names, WorldDisplay};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError { line, col, msg: msg.into() }
    }
}

#[cfg(test)]
mod tests;
