//! Test vectors: extraction from solver witnesses, XML exchange, black-box
//! execution of an implementation, and the requirements coverage report.

mod report;
mod run;
mod values;
mod xml;

use thiserror::Error;

use crate::context::{CallingContext, ContextCondition};
use crate::expr::Environment;
use crate::solver::SolveResult;
pub use report::{
    make_report, render_conditions, ConditionEntry, ConditionStatus, CoverageReport, OutcomeCounts,
    StatusCounts,
};
pub use run::{run_all, run_vector, Command, OutcomeStatus, TestOutcome, DEFAULT_TIMEOUT};
pub use values::{parse_value, value_from_json, value_text, value_to_json};
pub use xml::{export_vectors, import_vectors, vectors_function};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HarnessError {
    #[error("malformed vectors document: {0}")]
    Xml(String),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
}

/// Inputs that trigger one testing condition, with the outputs of the
/// solver's model as an advisory witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestVector {
    pub id: String,
    pub function: String,
    pub condition_id: String,
    pub trace: String,
    /// Values of the `in` and `global_in` parameters.
    pub inputs: Environment,
    /// Values of the outputs in the solver's model. Other implementations
    /// may legitimately produce different outputs.
    pub witness: Environment,
}

/// One vector per satisfiable condition, numbered in condition order.
pub fn vectors_from_results(
    ctx: &CallingContext,
    results: &[(&ContextCondition, SolveResult)],
) -> Vec<TestVector> {
    let found: Vec<_> = results
        .iter()
        .filter_map(|(c, r)| r.witness().map(|w| (c, w)))
        .collect();
    let width = found.len().to_string().len().max(3);
    found
        .into_iter()
        .enumerate()
        .map(|(n, (c, w))| {
            let split = |names: &mut dyn Iterator<Item = &String>| -> Environment {
                names
                    .filter_map(|name| w.get(name).map(|v| (name.clone(), v.clone())))
                    .collect()
            };
            TestVector {
                id: format!("V{:0width$}", n + 1),
                function: ctx.function().to_string(),
                condition_id: c.id.clone(),
                trace: c.description().to_string(),
                inputs: split(&mut ctx.spec.inputs().map(|p| &p.name)),
                witness: split(&mut ctx.spec.outputs().map(|p| &p.name)),
            }
        })
        .collect()
}
