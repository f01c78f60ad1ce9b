use super::{Atom, CoverageError, Literal, Polarity};
use crate::expr::{typecheck, Expr, Kind, Scope};

/// Boolean skeleton of a decision; leaves index into the condition list.
#[derive(Clone, Debug)]
pub(crate) enum Skeleton {
    Const(bool),
    Cond(usize),
    Not(Box<Skeleton>),
    And(Box<Skeleton>, Box<Skeleton>),
    Or(Box<Skeleton>, Box<Skeleton>),
}

impl Skeleton {
    /// Three-valued evaluation over a partial assignment.
    fn eval3(&self, values: &[Option<bool>]) -> Option<bool> {
        match self {
            Skeleton::Const(b) => Some(*b),
            Skeleton::Cond(i) => values[*i],
            Skeleton::Not(e) => e.eval3(values).map(|b| !b),
            Skeleton::And(a, b) => match (a.eval3(values), b.eval3(values)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
            Skeleton::Or(a, b) => match (a.eval3(values), b.eval3(values)) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
        }
    }

    fn eval(&self, values: &[bool]) -> bool {
        let partial: Vec<Option<bool>> = values.iter().copied().map(Some).collect();
        self.eval3(&partial).expect("total assignment")
    }
}

/// Splits a decision into its conditions (in order of first occurrence,
/// structurally equal conditions merged) and its Boolean skeleton.
pub(crate) fn decompose(
    decision: &Expr,
    scope: &dyn Scope,
) -> Result<(Vec<Atom>, Skeleton), CoverageError> {
    if typecheck(decision, scope)? != Kind::Bool {
        return Err(CoverageError::NotBoolean(decision.to_string()));
    }
    let mut atoms = Vec::new();
    let skeleton = build(decision, &mut atoms);
    Ok((atoms, skeleton))
}

fn build(e: &Expr, atoms: &mut Vec<Atom>) -> Skeleton {
    let mut leaf = |atom: Atom| {
        let idx = match atoms.iter().position(|a| *a == atom) {
            Some(i) => i,
            None => {
                atoms.push(atom);
                atoms.len() - 1
            }
        };
        Skeleton::Cond(idx)
    };
    match e {
        Expr::Const(v) => Skeleton::Const(v.as_bool().expect("Boolean constant")),
        Expr::Var(name) => leaf(Atom::BoolVar(name.clone())),
        Expr::Pred(p) => leaf(Atom::Pred(p.clone())),
        Expr::Ite(..) => leaf(Atom::Ite(Box::new(e.clone()))),
        Expr::Not(x) => Skeleton::Not(Box::new(build(x, atoms))),
        Expr::And(a, b) => {
            let a = build(a, atoms);
            Skeleton::And(Box::new(a), Box::new(build(b, atoms)))
        }
        Expr::Or(a, b) => {
            let a = build(a, atoms);
            Skeleton::Or(Box::new(a), Box::new(build(b, atoms)))
        }
        Expr::Arith(..) => unreachable!("type checked as Boolean"),
    }
}

/// One truth-table row selected for unique-cause MC/DC.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub values: Vec<bool>,
    pub outcome: bool,
}

/// Result of the MC/DC analysis of one decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mcdc {
    pub conditions: Vec<Atom>,
    /// Selected rows in ascending binary order, first condition most
    /// significant.
    pub rows: Vec<Row>,
    /// Conditions that cannot independently affect the decision.
    pub uncoverable: Vec<Atom>,
}

impl Mcdc {
    fn literals(&self, row: &Row) -> Vec<Literal> {
        if self.conditions.is_empty() {
            return vec![Literal::truth()];
        }
        self.conditions
            .iter()
            .zip(&row.values)
            .map(|(atom, &v)| Literal {
                atom: atom.clone(),
                negated: !v,
            })
            .collect()
    }

    /// The selected rows as literal conjunctions with their outcome.
    pub fn assignments(&self) -> Vec<(Vec<Literal>, Polarity)> {
        self.rows
            .iter()
            .map(|r| (self.literals(r), Polarity::from_outcome(r.outcome)))
            .collect()
    }

    /// Conjunctions for which the decision is true.
    pub fn plus(&self) -> Vec<Vec<Literal>> {
        self.rows
            .iter()
            .filter(|r| r.outcome)
            .map(|r| self.literals(r))
            .collect()
    }

    /// Conjunctions for which the decision is false.
    pub fn minus(&self) -> Vec<Vec<Literal>> {
        self.rows
            .iter()
            .filter(|r| !r.outcome)
            .map(|r| self.literals(r))
            .collect()
    }
}

/// Unique-cause MC/DC: for each condition, the first row (in ascending
/// binary order) whose outcome flips when only that condition flips,
/// together with its partner row.
pub fn mcdc(decision: &Expr, scope: &dyn Scope) -> Result<Mcdc, CoverageError> {
    let (conditions, skeleton) = decompose(decision, scope)?;
    let n = conditions.len();
    let mut rows: Vec<Vec<bool>> = Vec::new();
    let mut uncoverable = Vec::new();
    for (i, atom) in conditions.iter().enumerate() {
        match independence_pair(&skeleton, n, i) {
            Some(low) => {
                let mut high = low.clone();
                high[i] = true;
                for r in [low, high] {
                    if !rows.contains(&r) {
                        rows.push(r);
                    }
                }
            }
            None => uncoverable.push(atom.clone()),
        }
    }
    if rows.is_empty() {
        rows.push(vec![false; n]);
    }
    rows.sort();
    let rows = rows
        .into_iter()
        .map(|values| Row {
            outcome: skeleton.eval(&values),
            values,
        })
        .collect();
    Ok(Mcdc {
        conditions,
        rows,
        uncoverable,
    })
}

/// Least row with condition `i` false whose outcome differs from the row
/// with `i` true. Depth-first over the other conditions, false first, so
/// the first hit is the least such row; three-valued evaluation prunes
/// prefixes that already fix both outcomes to the same value.
fn independence_pair(skeleton: &Skeleton, n: usize, i: usize) -> Option<Vec<bool>> {
    let mut values: Vec<Option<bool>> = vec![None; n];
    fn search(s: &Skeleton, values: &mut Vec<Option<bool>>, i: usize, next: usize) -> bool {
        values[i] = Some(false);
        let low = s.eval3(values);
        values[i] = Some(true);
        let high = s.eval3(values);
        values[i] = None;
        match (low, high) {
            (Some(a), Some(b)) if a == b => return false,
            (Some(_), Some(_)) => {
                for v in values.iter_mut() {
                    v.get_or_insert(false);
                }
                return true;
            }
            _ => {}
        }
        let mut k = next;
        while k < values.len() && (k == i || values[k].is_some()) {
            k += 1;
        }
        if k == values.len() {
            return false;
        }
        for b in [false, true] {
            values[k] = Some(b);
            if search(s, values, i, k + 1) {
                return true;
            }
        }
        values[k] = None;
        false
    }
    if search(skeleton, &mut values, i, 0) {
        values[i] = Some(false);
        Some(values.into_iter().map(|v| v.expect("completed")).collect())
    } else {
        None
    }
}
