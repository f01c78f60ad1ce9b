//! Calling contexts and the enumeration of testing conditions with their
//! trap properties.
//!
//! A calling context replaces the body of the function under test by an
//! over-approximation: inputs take any value of their type, pre-conditions
//! are required, outputs take any value of their type, and post-conditions
//! are required. Every admissible behaviour of a correct implementation is
//! a model of the context.

use std::fmt::{self, Write};

use num_rational::BigRational;

use crate::coverage::{
    phi, tolerance_extend, ConditionSet, CoverageError, Polarity, Provenance, TestingCondition,
};
use crate::expr::{Expr, RelOp, Type, Value};
use crate::speclang::{Direction, FunctionSpec, SourceLocation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Segment {
    InType,
    Precondition,
    Postcondition,
    /// Pairwise combination of two input type constraints.
    InTypePair,
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Segment::InType => "in-type",
            Segment::Precondition => "precondition",
            Segment::Postcondition => "postcondition",
            Segment::InTypePair => "in-type pair",
        })
    }
}

/// One constraint of the context: an expression the context requires to hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub segment: Segment,
    pub expr: Expr,
    pub description: String,
    pub loc: SourceLocation,
}

impl Constraint {
    fn new(segment: Segment, expr: Expr, loc: &SourceLocation) -> Self {
        Constraint {
            segment,
            expr,
            description: format!("{segment} at {loc}"),
            loc: loc.clone(),
        }
    }
}

/// The implicit requirement that a variable holds a value of its type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeConstraint {
    pub var: String,
    pub direction: Direction,
    pub constraint: Constraint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CallingContext {
    pub spec: FunctionSpec,
    pub input_types: Vec<TypeConstraint>,
    pub preconditions: Vec<Constraint>,
    /// Outputs assigned by the over-approximated call, in declaration order.
    pub call_outputs: Vec<String>,
    pub output_types: Vec<TypeConstraint>,
    pub postconditions: Vec<Constraint>,
}

impl CallingContext {
    pub fn function(&self) -> &str {
        &self.spec.name
    }

    /// Every required constraint in context order.
    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.input_types
            .iter()
            .map(|t| &t.constraint)
            .chain(&self.preconditions)
            .chain(self.output_types.iter().map(|t| &t.constraint))
            .chain(&self.postconditions)
    }
}

/// Builds the calling context of `spec`. The function body plays no part.
pub fn build_context(spec: &FunctionSpec) -> CallingContext {
    let type_constraint = |p: &crate::speclang::Param| TypeConstraint {
        var: p.name.clone(),
        direction: p.direction,
        constraint: Constraint::new(Segment::InType, var_type_expr(&p.name, &p.ty), &p.loc),
    };
    CallingContext {
        spec: spec.clone(),
        input_types: spec.inputs().map(type_constraint).collect(),
        preconditions: spec
            .pre
            .iter()
            .map(|r| Constraint::new(Segment::Precondition, r.expr.clone(), &r.loc))
            .collect(),
        call_outputs: spec.outputs().map(|p| p.name.clone()).collect(),
        output_types: spec.outputs().map(type_constraint).collect(),
        postconditions: spec
            .post
            .iter()
            .map(|r| Constraint::new(Segment::Postcondition, r.expr.clone(), &r.loc))
            .collect(),
    }
}

/// The Boolean expression stating that `var` is a value of `ty`.
pub fn var_type_expr(var: &str, ty: &Type) -> Expr {
    let v = || Expr::var(var);
    match ty {
        Type::Int { lo, hi } => Expr::and(
            Expr::rel(Expr::int(*lo), RelOp::Le, v()),
            Expr::rel(v(), RelOp::Le, Expr::int(*hi)),
        ),
        Type::Real { lo, hi, .. } => Expr::and(
            Expr::rel(Expr::Const(Value::Real(lo.clone())), RelOp::Le, v()),
            Expr::rel(v(), RelOp::Le, Expr::Const(Value::Real(hi.clone()))),
        ),
        Type::Enum(e) => Expr::disjunction((0..e.literals.len()).map(|ordinal| {
            Expr::rel(
                v(),
                RelOp::Eq,
                Expr::Const(Value::Enum(crate::expr::EnumValue {
                    ty: e.clone(),
                    ordinal,
                })),
            )
        })),
        Type::Bool | Type::Char | Type::Str => Expr::bool(true),
    }
}

/// How many input type constraints are combined into one condition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub enum CombinationLevel {
    #[default]
    Single,
    Pairwise,
}

impl TryFrom<u8> for CombinationLevel {
    type Error = String;

    fn try_from(level: u8) -> Result<Self, String> {
        match level {
            1 => Ok(CombinationLevel::Single),
            2 => Ok(CombinationLevel::Pairwise),
            other => Err(format!("combination level must be 1 or 2, got {other}")),
        }
    }
}

/// Negation of a testing condition; a model of the context that violates
/// it is a witness of the condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrapProperty {
    pub expr: Expr,
    pub condition_id: String,
}

/// A testing condition of the context with its id and trap property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextCondition {
    pub id: String,
    pub segment: Segment,
    pub condition: TestingCondition,
    pub trap: TrapProperty,
}

impl ContextCondition {
    pub fn description(&self) -> &str {
        &self.condition.provenance.description
    }
}

/// Testing conditions for every type constraint, pre- and post-condition
/// of the context, in context order. With `sigma`, every requirement's set
/// is extended with boundary conditions; with [`CombinationLevel::Pairwise`]
/// the products of the condition sets of each pair of distinct inputs
/// follow.
pub fn enumerate_conditions(
    ctx: &CallingContext,
    sigma: Option<&BigRational>,
    level: CombinationLevel,
) -> Result<Vec<ContextCondition>, CoverageError> {
    let spec = &ctx.spec;
    let conditions_of = |c: &Constraint| -> Result<ConditionSet, CoverageError> {
        let provenance = Provenance {
            loc: Some(c.loc.clone()),
            description: c.description.clone(),
        };
        let mut set = phi(&c.expr, spec)?.with_provenance(&provenance);
        if let Some(sigma) = sigma {
            set = tolerance_extend(&set, sigma, spec)?;
        }
        Ok(set)
    };

    let mut out: Vec<(Segment, TestingCondition)> = Vec::new();
    let mut input_sets = Vec::new();
    for c in ctx.constraints() {
        let set = conditions_of(c)?;
        if c.segment == Segment::InType && ctx.input_types.iter().any(|t| &t.constraint == c) {
            input_sets.push((c, set.clone()));
        }
        out.extend(set.into_iter().map(|cond| (c.segment, cond)));
    }

    if level == CombinationLevel::Pairwise {
        for (i, (ci, si)) in input_sets.iter().enumerate() {
            for (cj, sj) in &input_sets[i + 1..] {
                let provenance = Provenance {
                    loc: Some(ci.loc.clone()),
                    description: format!("{} at {} and {}", Segment::InTypePair, ci.loc, cj.loc),
                };
                let mut pairs = ConditionSet::new();
                for x in si {
                    for y in sj {
                        let mut cond = TestingCondition::new(
                            x.literals.iter().chain(&y.literals).cloned().collect(),
                            Polarity::from_outcome(x.polarity.outcome() && y.polarity.outcome()),
                        );
                        cond.provenance = provenance.clone();
                        pairs.insert(cond);
                    }
                }
                pairs.canonicalize();
                out.extend(pairs.into_iter().map(|cond| (Segment::InTypePair, cond)));
            }
        }
    }

    let width = out.len().to_string().len().max(3);
    Ok(out
        .into_iter()
        .enumerate()
        .map(|(n, (segment, condition))| {
            let id = format!("C{:0width$}", n + 1);
            ContextCondition {
                trap: TrapProperty {
                    expr: condition.trap(),
                    condition_id: id.clone(),
                },
                id,
                segment,
                condition,
            }
        })
        .collect())
}

/// Human-readable rendering of the context in the shape of a C calling
/// context function.
pub fn render_context(ctx: &CallingContext) -> String {
    let mut out = String::new();
    let type_line = |out: &mut String, t: &TypeConstraint| {
        writeln!(
            out,
            "  {} := IN_TYPE({}, \"{}\");",
            t.var, t.constraint.expr, t.constraint.description
        )
        .unwrap();
    };
    writeln!(out, "void ___calling_context__{}(void)", ctx.function()).unwrap();
    out.push_str("{\n");
    out.push_str("  /* in-parameters */\n");
    for t in ctx
        .input_types
        .iter()
        .filter(|t| t.direction == Direction::In)
    {
        type_line(&mut out, t);
    }
    out.push_str("\n  /* in-globals */\n");
    for t in ctx
        .input_types
        .iter()
        .filter(|t| t.direction == Direction::GlobalIn)
    {
        type_line(&mut out, t);
    }
    out.push_str("\n  /* preconditions */\n");
    for c in &ctx.preconditions {
        writeln!(out, "  REQUIRE({}, \"{}\");", c.expr, c.description).unwrap();
    }
    out.push_str("\n  /* over-approximated call: out-parameters and out-globals */\n");
    for t in &ctx.output_types {
        type_line(&mut out, t);
    }
    out.push_str("\n  /* postconditions */\n");
    for c in &ctx.postconditions {
        writeln!(out, "  REQUIRE({}, \"{}\");", c.expr, c.description).unwrap();
    }
    out.push_str("}\n");
    out
}
