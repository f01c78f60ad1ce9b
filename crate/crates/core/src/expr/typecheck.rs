use thiserror::Error;

use super::ast::Expr;
use super::types::{Kind, Type};

/// Variable lookup used by type checking and everything downstream of it.
pub trait Scope {
    fn var_type(&self, name: &str) -> Option<&Type>;
}

impl Scope for std::collections::BTreeMap<String, Type> {
    fn var_type(&self, name: &str) -> Option<&Type> {
        self.get(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("undeclared variable `{name}`")]
    Undeclared { name: String },
    #[error("expected {expected} in `{expr}`, found {found}")]
    Mismatch {
        expected: String,
        found: Kind,
        expr: String,
    },
    #[error("operands of `{expr}` have incompatible kinds {lhs} and {rhs}")]
    Incompatible { lhs: Kind, rhs: Kind, expr: String },
    #[error("ITE branches of `{expr}` have different kinds {then_kind} and {else_kind}")]
    IteBranches {
        then_kind: Kind,
        else_kind: Kind,
        expr: String,
    },
    #[error("`{op}` needs ordered operands but `{expr}` compares {kind} values")]
    Unordered {
        op: &'static str,
        kind: Kind,
        expr: String,
    },
}

/// Computes the kind of `expr`, rejecting ill-formed requirement expressions.
pub fn typecheck(expr: &Expr, scope: &dyn Scope) -> Result<Kind, TypeError> {
    match expr {
        Expr::Const(v) => Ok(match v {
            super::Value::Bool(_) => Kind::Bool,
            super::Value::Int(_) => Kind::Int,
            super::Value::Real(_) => Kind::Real,
            super::Value::Enum(e) => Kind::Enum(e.ty.clone()),
            super::Value::Char(_) => Kind::Char,
            super::Value::Str(_) => Kind::Str,
        }),
        Expr::Var(name) => scope
            .var_type(name)
            .map(Type::kind)
            .ok_or_else(|| TypeError::Undeclared { name: name.clone() }),
        Expr::Not(e) => {
            expect_bool(e, scope)?;
            Ok(Kind::Bool)
        }
        Expr::And(a, b) | Expr::Or(a, b) => {
            expect_bool(a, scope)?;
            expect_bool(b, scope)?;
            Ok(Kind::Bool)
        }
        Expr::Pred(p) => {
            let lhs = typecheck(&p.lhs, scope)?;
            let rhs = typecheck(&p.rhs, scope)?;
            for (k, side) in [(&lhs, &p.lhs), (&rhs, &p.rhs)] {
                if *k == Kind::Bool {
                    return Err(TypeError::Mismatch {
                        expected: "non-Boolean operand".into(),
                        found: Kind::Bool,
                        expr: side.to_string(),
                    });
                }
            }
            let kind = unify(&lhs, &rhs).ok_or_else(|| TypeError::Incompatible {
                lhs: lhs.clone(),
                rhs: rhs.clone(),
                expr: expr.to_string(),
            })?;
            if p.op.needs_order() && !kind.is_ordered() {
                return Err(TypeError::Unordered {
                    op: p.op.symbol(),
                    kind,
                    expr: expr.to_string(),
                });
            }
            Ok(Kind::Bool)
        }
        Expr::Arith(_, a, b) => {
            let lhs = typecheck(a, scope)?;
            let rhs = typecheck(b, scope)?;
            for (k, side) in [(&lhs, a), (&rhs, b)] {
                if !k.is_numeric() {
                    return Err(TypeError::Mismatch {
                        expected: "int or real".into(),
                        found: k.clone(),
                        expr: side.to_string(),
                    });
                }
            }
            Ok(unify(&lhs, &rhs).expect("numeric kinds unify"))
        }
        Expr::Ite(g, a, b) => {
            expect_bool(g, scope)?;
            let then_kind = typecheck(a, scope)?;
            let else_kind = typecheck(b, scope)?;
            unify(&then_kind, &else_kind).ok_or_else(|| TypeError::IteBranches {
                then_kind,
                else_kind,
                expr: expr.to_string(),
            })
        }
    }
}

fn expect_bool(e: &Expr, scope: &dyn Scope) -> Result<(), TypeError> {
    match typecheck(e, scope)? {
        Kind::Bool => Ok(()),
        found => Err(TypeError::Mismatch {
            expected: "bool".into(),
            found,
            expr: e.to_string(),
        }),
    }
}

/// Common kind of two operands; integers promote to reals.
pub(crate) fn unify(a: &Kind, b: &Kind) -> Option<Kind> {
    match (a, b) {
        (Kind::Int, Kind::Real) | (Kind::Real, Kind::Int) => Some(Kind::Real),
        (x, y) if x == y => Some(x.clone()),
        _ => None,
    }
}

/// Kind of the operands of a predicate, assuming it type checks.
pub fn operand_kind(p: &super::Predicate, scope: &dyn Scope) -> Result<Kind, TypeError> {
    let lhs = typecheck(&p.lhs, scope)?;
    let rhs = typecheck(&p.rhs, scope)?;
    unify(&lhs, &rhs).ok_or_else(|| TypeError::Incompatible {
        lhs,
        rhs,
        expr: p.to_string(),
    })
}
