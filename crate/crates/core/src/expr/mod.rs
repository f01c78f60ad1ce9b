//! Typed requirement expressions: values, types, the expression tree, type
//! checking and evaluation.

mod ast;
mod eval;
mod typecheck;
mod types;
mod value;

pub use ast::{ArithOp, Expr, Predicate, RelOp};
pub use eval::{compare, eval, eval_bool, Environment, EvalError};
pub use typecheck::{operand_kind, typecheck, Scope, TypeError};
pub use types::{EnumType, Kind, Type};
pub use value::{format_decimal, parse_decimal, EnumValue, Value};

pub(crate) use eval::arith;
pub(crate) use value::{int_rational, rational_to_i128};
