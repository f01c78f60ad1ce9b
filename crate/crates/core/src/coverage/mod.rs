//! Testing conditions for Boolean requirements.
//!
//! A requirement is first analysed as an MC/DC decision ([`mcdc`]). Every
//! selected assignment is then rewritten so that no numeric predicate is
//! negated ([`neg_free`]) and every numeric predicate is one of `<`, `=`, `>`
//! ([`to_ordered`]); distributing those rewrites gives one testing
//! condition per combination of equivalence classes ([`expand`]).
//! If-then-else requirements combine the guard's conditions with those of
//! the branch it selects ([`compose_ite`]). [`tolerance_extend`] adds the
//! off-by-σ boundary values of strict predicates.

mod mcdc;
mod partition;
mod phi;
mod tolerance;

use std::fmt;

use thiserror::Error;

use crate::expr::{Expr, Predicate, TypeError};
use crate::speclang::SourceLocation;

pub use mcdc::{mcdc, Mcdc};
pub use partition::{neg_free, to_ordered};
pub use phi::{compose_ite, expand, phi};
pub use tolerance::tolerance_extend;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverageError {
    #[error("testing conditions need a Boolean expression, got `{0}`")]
    NotBoolean(String),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("`{0}` compares values without an order")]
    UnorderedOperands(String),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
}

/// An MC/DC condition: the smallest Boolean unit of a decision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Const(bool),
    BoolVar(String),
    Pred(Predicate),
    /// A Boolean if-then-else nested in a decision. MC/DC treats it as one
    /// condition; expansion replaces it with the conditions of its branches.
    Ite(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            atom,
            negated: false,
        }
    }

    pub fn pred(p: Predicate) -> Self {
        Literal::pos(Atom::Pred(p))
    }

    pub fn truth() -> Self {
        Literal::pos(Atom::Const(true))
    }

    pub fn to_expr(&self) -> Expr {
        let e = match &self.atom {
            Atom::Const(b) => Expr::bool(*b),
            Atom::BoolVar(v) => Expr::var(v.clone()),
            Atom::Pred(p) => Expr::Pred(p.clone()),
            Atom::Ite(e) => (**e).clone(),
        };
        if self.negated {
            Expr::not(e)
        } else {
            e
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_expr().fmt(f)
    }
}

/// Which outcome of the decision a testing condition exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    DecisionTrue,
    DecisionFalse,
}

impl Polarity {
    pub fn from_outcome(outcome: bool) -> Self {
        if outcome {
            Polarity::DecisionTrue
        } else {
            Polarity::DecisionFalse
        }
    }

    pub fn outcome(self) -> bool {
        self == Polarity::DecisionTrue
    }

    pub fn sign(self) -> char {
        if self.outcome() {
            '+'
        } else {
            '-'
        }
    }
}

/// Where a testing condition comes from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Provenance {
    pub loc: Option<SourceLocation>,
    /// Traceability text, e.g. `postcondition at basic_tests.ads:52:20`.
    pub description: String,
}

/// A conjunction of literals with the decision outcome it represents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TestingCondition {
    pub literals: Vec<Literal>,
    pub polarity: Polarity,
    pub provenance: Provenance,
}

impl TestingCondition {
    pub fn new(literals: Vec<Literal>, polarity: Polarity) -> Self {
        TestingCondition {
            literals: normalize(literals),
            polarity,
            provenance: Provenance::default(),
        }
    }

    pub fn to_expr(&self) -> Expr {
        Expr::conjunction(self.literals.iter().map(Literal::to_expr))
    }

    /// The trap property: the negation of the condition.
    pub fn trap(&self) -> Expr {
        Expr::not(self.to_expr())
    }

    fn key(&self) -> Vec<Literal> {
        let mut k = self.literals.clone();
        k.sort();
        k
    }

    fn order_key(&self) -> (Option<&SourceLocation>, &[Literal], Polarity) {
        (self.provenance.loc.as_ref(), &self.literals, self.polarity)
    }
}

impl fmt::Display for TestingCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_expr().fmt(f)
    }
}

/// Drops `true` literals from non-trivial conjunctions; an empty
/// conjunction becomes the single literal `true`.
pub(crate) fn normalize(literals: Vec<Literal>) -> Vec<Literal> {
    let mut out: Vec<Literal> = literals
        .into_iter()
        .filter(|l| !(l.atom == Atom::Const(true) && !l.negated))
        .collect();
    if out.is_empty() {
        out.push(Literal::truth());
    }
    out
}

/// A set of testing conditions, deduplicated by literal multiset and kept
/// in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConditionSet {
    conditions: Vec<TestingCondition>,
}

impl ConditionSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `cond` unless a condition with the same literals is present.
    /// Returns whether it was added.
    pub fn insert(&mut self, cond: TestingCondition) -> bool {
        let key = cond.key();
        if self.conditions.iter().any(|c| c.key() == key) {
            return false;
        }
        self.conditions.push(cond);
        true
    }

    pub fn extend(&mut self, other: impl IntoIterator<Item = TestingCondition>) {
        for c in other {
            self.insert(c);
        }
    }

    /// Sorts by (origin location, literal sequence, polarity).
    pub fn canonicalize(&mut self) {
        self.conditions
            .sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    }

    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TestingCondition> {
        self.conditions.iter()
    }

    /// Conditions under which the decision holds.
    pub fn plus(&self) -> impl Iterator<Item = &TestingCondition> {
        self.conditions.iter().filter(|c| c.polarity.outcome())
    }

    /// Conditions under which the decision fails.
    pub fn minus(&self) -> impl Iterator<Item = &TestingCondition> {
        self.conditions.iter().filter(|c| !c.polarity.outcome())
    }

    /// Rewrites the provenance of every member.
    pub fn with_provenance(mut self, provenance: &Provenance) -> Self {
        for c in &mut self.conditions {
            c.provenance = provenance.clone();
        }
        self
    }

    pub fn into_vec(self) -> Vec<TestingCondition> {
        self.conditions
    }
}

impl IntoIterator for ConditionSet {
    type Item = TestingCondition;
    type IntoIter = std::vec::IntoIter<TestingCondition>;

    fn into_iter(self) -> Self::IntoIter {
        self.conditions.into_iter()
    }
}

impl<'a> IntoIterator for &'a ConditionSet {
    type Item = &'a TestingCondition;
    type IntoIter = std::slice::Iter<'a, TestingCondition>;

    fn into_iter(self) -> Self::IntoIter {
        self.conditions.iter()
    }
}

impl FromIterator<TestingCondition> for ConditionSet {
    fn from_iter<I: IntoIterator<Item = TestingCondition>>(iter: I) -> Self {
        let mut set = ConditionSet::new();
        set.extend(iter);
        set
    }
}
