//! The `.reqspec` requirement document format.
//!
//! A document is a sequence of function blocks. Each block declares typed
//! parameters and lists pre- and post-conditions, one requirement per
//! `pre:`/`post:` entry:
//!
//! ```text
//! function constrained_add
//!   in M: int range 0 .. 10
//!   in N: int range 0 .. 10
//!   out Res: int range 0 .. 10
//!   @ basic_tests.ads:52:20
//!   post: ITE(M + N <= 10, Res == M + N, Res == 10)
//! ```
//!
//! An `@ file:line:col` line overrides the recorded source location of the
//! declaration that follows it, so requirements can trace back to the
//! contract they were transcribed from.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

use crate::expr::{Expr, Scope, Type, TypeError};

pub use parser::{parse, parse_expression};
pub use printer::{print, print_all};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceLocation {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl SourceLocation {
    pub fn new(file: impl Into<String>, line: u32, column: u32) -> Self {
        SourceLocation {
            file: file.into(),
            line,
            column,
        }
    }
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    In,
    Out,
    GlobalIn,
    GlobalOut,
}

impl Direction {
    pub fn is_input(self) -> bool {
        matches!(self, Direction::In | Direction::GlobalIn)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Direction::In => "in",
            Direction::Out => "out",
            Direction::GlobalIn => "global_in",
            Direction::GlobalOut => "global_out",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub direction: Direction,
    pub ty: Type,
    pub loc: SourceLocation,
}

/// One pre- or post-condition and where it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Requirement {
    pub expr: Expr,
    pub loc: SourceLocation,
}

/// A function's signature together with its formal requirements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionSpec {
    pub name: String,
    pub params: Vec<Param>,
    pub pre: Vec<Requirement>,
    pub post: Vec<Requirement>,
}

impl FunctionSpec {
    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn inputs(&self) -> impl Iterator<Item = &Param> {
        self.params.iter().filter(|p| p.direction.is_input())
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Param> {
        self.params.iter().filter(|p| !p.direction.is_input())
    }
}

impl Scope for FunctionSpec {
    fn var_type(&self, name: &str) -> Option<&Type> {
        self.param(name).map(|p| &p.ty)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("{loc}: syntax error: {message}")]
    Syntax {
        loc: SourceLocation,
        message: String,
    },
    #[error("{loc}: type error: {source}")]
    Type {
        loc: SourceLocation,
        #[source]
        source: TypeError,
    },
    #[error("{loc}: {message}")]
    Invalid {
        loc: SourceLocation,
        message: String,
    },
}

impl SpecError {
    pub fn location(&self) -> &SourceLocation {
        match self {
            SpecError::Syntax { loc, .. }
            | SpecError::Type { loc, .. }
            | SpecError::Invalid { loc, .. } => loc,
        }
    }
}
