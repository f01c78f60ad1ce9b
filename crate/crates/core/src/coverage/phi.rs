use super::{
    mcdc, neg_free, to_ordered, Atom, ConditionSet, CoverageError, Literal, Polarity,
    TestingCondition,
};
use crate::expr::{operand_kind, typecheck, Expr, Kind, Scope};

/// Full testing-condition set of a Boolean requirement.
pub fn phi(expr: &Expr, scope: &dyn Scope) -> Result<ConditionSet, CoverageError> {
    if typecheck(expr, scope)? != Kind::Bool {
        return Err(CoverageError::NotBoolean(expr.to_string()));
    }
    let mut set = match expr {
        Expr::Ite(..) => compose_ite(expr, scope)?,
        _ => {
            let analysis = mcdc(expr, scope)?;
            let mut set = ConditionSet::new();
            for (literals, polarity) in analysis.assignments() {
                set.extend(expand(&literals, polarity, scope)?);
            }
            set
        }
    };
    set.canonicalize();
    Ok(set)
}

/// Testing conditions of `ITE(g, a, b)`: every true-condition of `g`
/// joined with every condition of `a`, and every false-condition of `g`
/// joined with every condition of `b`. The branch decides the polarity.
pub fn compose_ite(expr: &Expr, scope: &dyn Scope) -> Result<ConditionSet, CoverageError> {
    let Expr::Ite(guard, then_branch, else_branch) = expr else {
        return Err(CoverageError::NotBoolean(expr.to_string()));
    };
    for branch in [then_branch, else_branch] {
        if typecheck(branch, scope)? != Kind::Bool {
            return Err(CoverageError::NotBoolean(branch.to_string()));
        }
    }
    let guard_set = phi(guard, scope)?;
    let mut set = ConditionSet::new();
    for (guard_polarity, branch) in [(true, then_branch), (false, else_branch)] {
        let branch_set = phi(branch, scope)?;
        for x in guard_set
            .iter()
            .filter(|c| c.polarity.outcome() == guard_polarity)
        {
            for y in &branch_set {
                let literals = x.literals.iter().chain(&y.literals).cloned().collect();
                set.insert(TestingCondition::new(literals, y.polarity));
            }
        }
    }
    set.canonicalize();
    Ok(set)
}

/// Distributes the equivalence-class rewrites of each literal over the
/// conjunction: negated numeric predicates go through [`neg_free`], the
/// rest through [`to_ordered`].
pub fn expand(
    literals: &[Literal],
    polarity: Polarity,
    scope: &dyn Scope,
) -> Result<ConditionSet, CoverageError> {
    let mut partial: Vec<Vec<Literal>> = vec![Vec::new()];
    for lit in literals {
        partial = product(&partial, &alternatives(lit, scope)?);
    }
    Ok(partial
        .into_iter()
        .map(|lits| TestingCondition::new(lits, polarity))
        .collect())
}

fn product(left: &[Vec<Literal>], right: &[Vec<Literal>]) -> Vec<Vec<Literal>> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for l in left {
        for r in right {
            out.push(l.iter().chain(r).cloned().collect());
        }
    }
    out
}

fn alternatives(lit: &Literal, scope: &dyn Scope) -> Result<Vec<Vec<Literal>>, CoverageError> {
    match &lit.atom {
        Atom::Const(_) | Atom::BoolVar(_) => Ok(vec![vec![lit.clone()]]),
        Atom::Pred(p) => {
            let kind = operand_kind(p, scope)?;
            let classes = if lit.negated {
                neg_free(p, &kind)?
            } else {
                to_ordered(p, &kind)?
            };
            let classes: Vec<Vec<Literal>> = classes
                .into_iter()
                .map(|q| vec![Literal::pred(q)])
                .collect();
            // A non-Boolean ITE operand contributes its guard's conditions
            // only; its branch values are not analysed further.
            let mut guards = Vec::new();
            value_ite_guards(&p.lhs, &mut guards);
            value_ite_guards(&p.rhs, &mut guards);
            let mut acc: Vec<Vec<Literal>> = vec![Vec::new()];
            for g in guards {
                let conds: Vec<Vec<Literal>> =
                    phi(g, scope)?.into_iter().map(|c| c.literals).collect();
                acc = product(&acc, &conds);
            }
            Ok(product(&acc, &classes))
        }
        Atom::Ite(e) => Ok(compose_ite(e, scope)?
            .into_iter()
            .filter(|c| c.polarity.outcome() != lit.negated)
            .map(|c| c.literals)
            .collect()),
    }
}

/// Guards of the outermost if-then-else terms inside a non-Boolean operand.
fn value_ite_guards<'e>(e: &'e Expr, out: &mut Vec<&'e Expr>) {
    match e {
        Expr::Ite(g, _, _) => {
            if !out.contains(&&**g) {
                out.push(g);
            }
        }
        Expr::Arith(_, a, b) => {
            value_ite_guards(a, out);
            value_ite_guards(b, out);
        }
        _ => {}
    }
}
