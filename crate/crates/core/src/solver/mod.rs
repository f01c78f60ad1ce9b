//! Finite-domain satisfiability of a calling context conjoined with one
//! testing condition.
//!
//! Every variable ranges over the grid of its declared type. The search
//! alternates interval propagation with depth-first branching on variables
//! in declaration order, trying smaller values first, so the first model
//! found is the lexicographically least one. Candidate models are confirmed
//! by exact evaluation before they are returned.

mod domain;
mod propagate;

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use crate::context::{CallingContext, ContextCondition};
use crate::coverage::TestingCondition;
use crate::expr::{eval_bool, Environment, Expr};
pub use domain::Domain;
use domain::Tables;
use propagate::{Propagator, Store};

/// Upper bound on the number of propagation sweeps per search node.
const MAX_SWEEPS: usize = 32;

/// Ranges at most this wide are enumerated value by value instead of split.
const ENUMERATE_WIDTH: u128 = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Search nodes per condition before giving up with [`SolveResult::Unknown`].
    pub max_nodes: u64,
    /// Worker threads for [`solve_all`]; 0 picks one per core.
    pub parallel: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_nodes: 1_000_000,
            parallel: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// The least assignment of all variables satisfying every constraint.
    Sat(Environment),
    /// No assignment over the declared domains satisfies the constraints.
    Unsat,
    /// The search gave up; the reason says why.
    Unknown(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Sat,
    Unsat,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
            Verdict::Unknown => "UNKNOWN",
        })
    }
}

impl SolveResult {
    pub fn verdict(&self) -> Verdict {
        match self {
            SolveResult::Sat(_) => Verdict::Sat,
            SolveResult::Unsat => Verdict::Unsat,
            SolveResult::Unknown(_) => Verdict::Unknown,
        }
    }

    pub fn witness(&self) -> Option<&Environment> {
        match self {
            SolveResult::Sat(env) => Some(env),
            _ => None,
        }
    }
}

/// Whether `env` satisfies every constraint of `ctx` and `goal`.
pub fn verify_witness(ctx: &CallingContext, goal: &TestingCondition, env: &Environment) -> bool {
    let holds = |e: &Expr| eval_bool(e, env) == Ok(true);
    env.check_in_domain(&ctx.spec).is_ok()
        && ctx.constraints().all(|c| holds(&c.expr))
        && holds(&goal.to_expr())
}

/// Decides `ctx` conjoined with `goal`.
pub fn solve(ctx: &CallingContext, goal: &TestingCondition, config: &SolverConfig) -> SolveResult {
    let constraints: Vec<&Expr> = ctx.constraints().map(|c| &c.expr).collect();
    let literals: Vec<Expr> = goal.literals.iter().map(|l| l.to_expr()).collect();
    let goal_expr = goal.to_expr();

    let declared: HashMap<String, usize> = ctx
        .spec
        .params
        .iter()
        .enumerate()
        .map(|(i, p)| (p.name.clone(), i))
        .collect();
    if let Some(v) = goal_expr
        .free_vars()
        .into_iter()
        .find(|v| !declared.contains_key(v))
    {
        return SolveResult::Unknown(format!("condition mentions undeclared variable `{v}`"));
    }

    let types: Vec<_> = ctx.spec.params.iter().map(|p| p.ty.clone()).collect();
    let tables = Tables::new(constraints.iter().copied().chain(&literals), &types);
    let domains = match ctx
        .spec
        .params
        .iter()
        .map(|p| tables.domain(&p.name, &p.ty))
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(d) => d,
        Err(reason) => return SolveResult::Unknown(reason),
    };

    let search = Search {
        prop: Propagator {
            domains: &domains,
            index: &declared,
            tables: &tables,
        },
        required: constraints.iter().copied().chain(&literals).collect(),
        exact: constraints
            .iter()
            .copied()
            .chain(std::iter::once(&goal_expr))
            .collect(),
        max_nodes: config.max_nodes,
        nodes: 0,
    };
    search.run(Store {
        ranges: domains.iter().map(|d| (d.lo, d.hi)).collect(),
    })
}

/// Decides every condition against `ctx`, in parallel, preserving order.
pub fn solve_all<'c, C>(
    ctx: &CallingContext,
    goals: &'c [C],
    config: &SolverConfig,
) -> Vec<(&'c C, SolveResult)>
where
    C: AsRef<TestingCondition> + Sync,
{
    let work = || {
        goals
            .par_iter()
            .map(|g| (g, solve(ctx, g.as_ref(), config)))
            .collect()
    };
    match rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallel)
        .build()
    {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

impl AsRef<TestingCondition> for TestingCondition {
    fn as_ref(&self) -> &TestingCondition {
        self
    }
}

impl AsRef<TestingCondition> for ContextCondition {
    fn as_ref(&self) -> &TestingCondition {
        &self.condition
    }
}

struct Search<'a> {
    prop: Propagator<'a>,
    /// Requirements used for propagation; the goal is split into literals.
    required: Vec<&'a Expr>,
    /// Requirements confirmed by evaluation at the leaves.
    exact: Vec<&'a Expr>,
    max_nodes: u64,
    nodes: u64,
}

enum Step {
    Found(Environment),
    Exhausted,
    OutOfBudget,
}

impl Search<'_> {
    fn run(mut self, root: Store) -> SolveResult {
        match self.dfs(root) {
            Step::Found(env) => SolveResult::Sat(env),
            Step::Exhausted => SolveResult::Unsat,
            Step::OutOfBudget => {
                SolveResult::Unknown(format!("node budget of {} exhausted", self.max_nodes))
            }
        }
    }

    fn propagate(&self, s: &mut Store) -> bool {
        for _ in 0..MAX_SWEEPS {
            let before = s.ranges.clone();
            for e in &self.required {
                if self.prop.enforce(e, true, s).is_err() {
                    return false;
                }
            }
            if s.ranges == before {
                break;
            }
        }
        true
    }

    fn dfs(&mut self, mut s: Store) -> Step {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Step::OutOfBudget;
        }
        if !self.propagate(&mut s) {
            return Step::Exhausted;
        }
        let Some(i) = s.ranges.iter().position(|(a, b)| a < b) else {
            return self.leaf(&s);
        };
        let (a, b) = s.ranges[i];
        let width = b.wrapping_sub(a) as u128;
        let children: Vec<(i128, i128)> = if width < ENUMERATE_WIDTH {
            (a..=b).map(|k| (k, k)).collect()
        } else {
            let mid = a + (width / 2) as i128;
            vec![(a, mid), (mid + 1, b)]
        };
        for range in children {
            let mut child = s.clone();
            child.ranges[i] = range;
            match self.dfs(child) {
                Step::Exhausted => continue,
                found_or_budget => return found_or_budget,
            }
        }
        Step::Exhausted
    }

    fn leaf(&self, s: &Store) -> Step {
        let env: Environment = self
            .prop
            .domains
            .iter()
            .zip(&s.ranges)
            .map(|(d, (k, _))| (d.var.clone(), d.value(*k)))
            .collect();
        if self.exact.iter().all(|e| eval_bool(e, &env) == Ok(true)) {
            Step::Found(env)
        } else {
            Step::Exhausted
        }
    }
}
