use num_rational::BigRational;
use num_traits::Signed;

use super::{Atom, ConditionSet, CoverageError, Literal, TestingCondition};
use crate::expr::{
    format_decimal, operand_kind, rational_to_i128, ArithOp, Expr, Kind, Predicate, RelOp, Scope,
    Type, Value,
};

/// Adds boundary conditions at distance `sigma`: for each occurrence of a
/// numeric `a < b` (resp. `a > b`) in a condition, a copy of that condition
/// with the occurrence replaced by `a = b - sigma` (resp. `a = b + sigma`).
/// The original conditions are kept.
pub fn tolerance_extend(
    set: &ConditionSet,
    sigma: &BigRational,
    scope: &dyn Scope,
) -> Result<ConditionSet, CoverageError> {
    if !sigma.is_positive() {
        return Err(CoverageError::InvalidTolerance(format!(
            "sigma must be positive, got {}",
            format_decimal(sigma)
        )));
    }
    let mut out = set.clone();
    for cond in set {
        for (k, lit) in cond.literals.iter().enumerate() {
            let Atom::Pred(p) = &lit.atom else { continue };
            if lit.negated || !matches!(p.op, RelOp::Lt | RelOp::Gt) {
                continue;
            }
            let kind = operand_kind(p, scope)?;
            if !kind.is_numeric() {
                continue;
            }
            let boundary = boundary_predicate(p, &kind, sigma, scope)?;
            let mut literals = cond.literals.clone();
            literals[k] = Literal::pred(boundary);
            out.insert(TestingCondition {
                literals,
                polarity: cond.polarity,
                provenance: cond.provenance.clone(),
            });
        }
    }
    out.canonicalize();
    Ok(out)
}

fn boundary_predicate(
    p: &Predicate,
    kind: &Kind,
    sigma: &BigRational,
    scope: &dyn Scope,
) -> Result<Predicate, CoverageError> {
    let sigma_const = match kind {
        Kind::Int => Value::Int(rational_to_i128(sigma).ok_or_else(|| {
            CoverageError::InvalidTolerance(format!(
                "sigma {} is not an integer but `{p}` compares integers",
                format_decimal(sigma)
            ))
        })?),
        _ => {
            for var in Expr::Pred(p.clone()).free_vars() {
                if let Some(Type::Real { step, .. }) = scope.var_type(&var) {
                    if !(sigma / step).is_integer() {
                        return Err(CoverageError::InvalidTolerance(format!(
                            "sigma {} is not a multiple of the step {} of `{var}`",
                            format_decimal(sigma),
                            format_decimal(step)
                        )));
                    }
                }
            }
            Value::Real(sigma.clone())
        }
    };
    let op = if p.op == RelOp::Lt {
        ArithOp::Sub
    } else {
        ArithOp::Add
    };
    let rhs = match &*p.rhs {
        Expr::Const(c) if c.is_numeric() => {
            let folded = crate::expr::arith(op, c, &sigma_const).ok_or_else(|| {
                CoverageError::InvalidTolerance(format!("boundary of `{p}` overflows"))
            })?;
            Expr::Const(folded)
        }
        rhs => Expr::arith(op, rhs.clone(), Expr::Const(sigma_const)),
    };
    Ok(Predicate {
        lhs: p.lhs.clone(),
        op: RelOp::Eq,
        rhs: Box::new(rhs),
    })
}
