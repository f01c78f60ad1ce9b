use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::BigRational;
use thiserror::Error;

use super::ast::{ArithOp, Expr};
use super::typecheck::Scope;
use super::value::Value;

/// Variable bindings for evaluation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Environment {
    bindings: BTreeMap<String, Value>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: impl Into<String>, value: Value) -> Option<Value> {
        self.bindings.insert(name.into(), value)
    }

    pub fn with(mut self, name: impl Into<String>, value: Value) -> Self {
        self.bind(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.bindings.iter()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Checks that every bound value lies in its variable's declared type.
    pub fn check_in_domain(&self, scope: &dyn Scope) -> Result<(), String> {
        for (name, value) in &self.bindings {
            match scope.var_type(name) {
                None => return Err(format!("`{name}` is not a declared variable")),
                Some(ty) if !ty.contains(value) => {
                    return Err(format!("value {value} of `{name}` is outside its type"))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

impl FromIterator<(String, Value)> for Environment {
    fn from_iter<I: IntoIterator<Item = (String, Value)>>(iter: I) -> Self {
        Environment {
            bindings: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no binding for variable `{0}`")]
    MissingBinding(String),
    #[error("integer overflow evaluating `{0}`")]
    Overflow(String),
    #[error("ill-typed operand in `{0}`")]
    IllTyped(String),
}

/// Big-step evaluation of a type-checked expression.
pub fn eval(expr: &Expr, env: &Environment) -> Result<Value, EvalError> {
    match expr {
        Expr::Const(v) => Ok(v.clone()),
        Expr::Var(name) => env
            .get(name)
            .cloned()
            .ok_or_else(|| EvalError::MissingBinding(name.clone())),
        Expr::Not(e) => Ok(Value::Bool(!eval_bool(e, env)?)),
        // Both operands are evaluated so a missing binding is never masked.
        Expr::And(a, b) => {
            let (x, y) = (eval_bool(a, env)?, eval_bool(b, env)?);
            Ok(Value::Bool(x && y))
        }
        Expr::Or(a, b) => {
            let (x, y) = (eval_bool(a, env)?, eval_bool(b, env)?);
            Ok(Value::Bool(x || y))
        }
        Expr::Pred(p) => {
            let lhs = eval(&p.lhs, env)?;
            let rhs = eval(&p.rhs, env)?;
            let ord = compare(&lhs, &rhs).ok_or_else(|| EvalError::IllTyped(expr.to_string()))?;
            Ok(Value::Bool(p.op.holds(ord)))
        }
        Expr::Arith(op, a, b) => {
            let lhs = eval(a, env)?;
            let rhs = eval(b, env)?;
            arith(*op, &lhs, &rhs).ok_or_else(|| match (&lhs, &rhs) {
                (Value::Int(_), Value::Int(_)) => EvalError::Overflow(expr.to_string()),
                _ => EvalError::IllTyped(expr.to_string()),
            })
        }
        Expr::Ite(g, a, b) => {
            if eval_bool(g, env)? {
                eval(a, env)
            } else {
                eval(b, env)
            }
        }
    }
}

/// Evaluates a Boolean expression.
pub fn eval_bool(expr: &Expr, env: &Environment) -> Result<bool, EvalError> {
    eval(expr, env)?
        .as_bool()
        .ok_or_else(|| EvalError::IllTyped(expr.to_string()))
}

/// Total order within a kind; `None` for values of different kinds.
pub fn compare(a: &Value, b: &Value) -> Option<Ordering> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Some(x.cmp(y)),
        (x, y) if x.is_numeric() && y.is_numeric() => Some(x.as_rational()?.cmp(&y.as_rational()?)),
        (Value::Enum(x), Value::Enum(y)) if x.ty == y.ty => Some(x.ordinal.cmp(&y.ordinal)),
        (Value::Char(x), Value::Char(y)) => Some(x.cmp(y)),
        (Value::Str(x), Value::Str(y)) => Some(x.cmp(y)),
        _ => None,
    }
}

pub(crate) fn arith(op: ArithOp, a: &Value, b: &Value) -> Option<Value> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => match op {
            ArithOp::Add => x.checked_add(*y),
            ArithOp::Sub => x.checked_sub(*y),
            ArithOp::Mul => x.checked_mul(*y),
        }
        .map(Value::Int),
        (x, y) if x.is_numeric() && y.is_numeric() => {
            let (x, y): (BigRational, BigRational) = (x.as_rational()?, y.as_rational()?);
            Some(Value::Real(match op {
                ArithOp::Add => x + y,
                ArithOp::Sub => x - y,
                ArithOp::Mul => x * y,
            }))
        }
        _ => None,
    }
}
