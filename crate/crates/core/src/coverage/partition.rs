use super::CoverageError;
use crate::expr::{Kind, Predicate, RelOp};

/// Rewrites `!(lhs op rhs)` as the set of non-negated predicates that
/// partition its truth set.
///
/// Over characters and strings only `=` and `!=` exist, so their negations
/// swap directly.
pub fn neg_free(pred: &Predicate, operand_kind: &Kind) -> Result<Vec<Predicate>, CoverageError> {
    use RelOp::*;
    if !operand_kind.is_ordered() {
        return match pred.op {
            Eq => Ok(vec![pred.with_op(Ne)]),
            Ne => Ok(vec![pred.with_op(Eq)]),
            _ => Err(CoverageError::UnorderedOperands(pred.to_string())),
        };
    }
    let ops: &[RelOp] = match pred.op {
        Lt => &[Eq, Gt],
        Le => &[Gt],
        Eq => &[Lt, Gt],
        Ge => &[Lt],
        Gt => &[Eq, Lt],
        Ne => &[Eq],
    };
    Ok(ops.iter().map(|&op| pred.with_op(op)).collect())
}

/// Expands `<=`, `>=` and `!=` into the ordered predicates (`<`, `=`, `>`)
/// they are the union of. Ordered predicates come back unchanged.
pub fn to_ordered(pred: &Predicate, operand_kind: &Kind) -> Result<Vec<Predicate>, CoverageError> {
    use RelOp::*;
    if !operand_kind.is_ordered() {
        return match pred.op {
            Eq | Ne => Ok(vec![pred.clone()]),
            _ => Err(CoverageError::UnorderedOperands(pred.to_string())),
        };
    }
    let ops: &[RelOp] = match pred.op {
        Le => &[Lt, Eq],
        Ge => &[Gt, Eq],
        Ne => &[Lt, Gt],
        op => return Ok(vec![pred.with_op(op)]),
    };
    Ok(ops.iter().map(|&op| pred.with_op(op)).collect())
}
