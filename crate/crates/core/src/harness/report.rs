use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};

use serde_json::{json, Value as Json};

use super::run::{OutcomeStatus, TestOutcome};
use super::values::value_to_json;
use super::{HarnessError, TestVector};
use crate::context::ContextCondition;
use crate::solver::SolveResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConditionStatus {
    VectorGenerated,
    Infeasible,
    Inconclusive,
}

impl ConditionStatus {
    pub fn name(self) -> &'static str {
        match self {
            ConditionStatus::VectorGenerated => "VECTOR_GENERATED",
            ConditionStatus::Infeasible => "INFEASIBLE",
            ConditionStatus::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for ConditionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionEntry {
    pub id: String,
    pub trace: String,
    pub polarity: char,
    pub condition: String,
    pub status: ConditionStatus,
    pub vector_id: Option<String>,
    /// Why the solver gave up, for inconclusive conditions.
    pub reason: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StatusCounts {
    pub vector_generated: usize,
    pub infeasible: usize,
    pub inconclusive: usize,
}

impl StatusCounts {
    pub fn total(&self) -> usize {
        self.vector_generated + self.infeasible + self.inconclusive
    }

    pub fn get(&self, status: ConditionStatus) -> usize {
        match status {
            ConditionStatus::VectorGenerated => self.vector_generated,
            ConditionStatus::Infeasible => self.infeasible,
            ConditionStatus::Inconclusive => self.inconclusive,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub pass: usize,
    pub post_violation: usize,
    pub not_triggered: usize,
    pub exec_error: usize,
}

impl OutcomeCounts {
    pub fn total(&self) -> usize {
        self.pass + self.post_violation + self.not_triggered + self.exec_error
    }

    pub fn get(&self, status: OutcomeStatus) -> usize {
        match status {
            OutcomeStatus::Pass => self.pass,
            OutcomeStatus::PostViolation => self.post_violation,
            OutcomeStatus::NotTriggered => self.not_triggered,
            OutcomeStatus::ExecError => self.exec_error,
        }
    }
}

/// Requirements coverage of one function: the fate of every testing
/// condition and, after execution, the outcome of every vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageReport {
    pub function: String,
    pub conditions: Vec<ConditionEntry>,
    pub outcomes: Vec<TestOutcome>,
}

const CONDITION_STATUSES: [ConditionStatus; 3] = [
    ConditionStatus::VectorGenerated,
    ConditionStatus::Infeasible,
    ConditionStatus::Inconclusive,
];

/// Assembles the report. Every outcome must belong to one of `vectors`,
/// and every vector to a condition the solver found satisfiable.
pub fn make_report(
    function: &str,
    results: &[(&ContextCondition, SolveResult)],
    vectors: &[TestVector],
    outcomes: Vec<TestOutcome>,
) -> Result<CoverageReport, HarnessError> {
    let bad = |m: String| Err(HarnessError::InconsistentInput(m));
    let mut by_condition: BTreeMap<&str, &TestVector> = BTreeMap::new();
    for v in vectors {
        match results.iter().find(|(c, _)| c.id == v.condition_id) {
            None => {
                return bad(format!(
                    "vector `{}` names unknown condition `{}`",
                    v.id, v.condition_id
                ))
            }
            Some((_, SolveResult::Sat(_))) => {}
            Some(_) => {
                return bad(format!(
                    "vector `{}` names condition `{}`, which has no witness",
                    v.id, v.condition_id
                ))
            }
        }
        if by_condition.insert(&v.condition_id, v).is_some() {
            return bad(format!(
                "condition `{}` has several vectors",
                v.condition_id
            ));
        }
    }
    let mut seen = BTreeSet::new();
    for o in &outcomes {
        match vectors.iter().find(|v| v.id == o.vector_id) {
            Some(v) if v.condition_id == o.condition_id => {}
            Some(v) => {
                return bad(format!(
                    "outcome of vector `{}` names condition `{}`, not `{}`",
                    o.vector_id, o.condition_id, v.condition_id
                ))
            }
            None => return bad(format!("outcome names unknown vector `{}`", o.vector_id)),
        }
        if !seen.insert(&o.vector_id) {
            return bad(format!("vector `{}` has several outcomes", o.vector_id));
        }
    }

    let conditions = results
        .iter()
        .map(|(c, r)| {
            let (status, reason) = match r {
                SolveResult::Sat(_) => (ConditionStatus::VectorGenerated, None),
                SolveResult::Unsat => (ConditionStatus::Infeasible, None),
                SolveResult::Unknown(why) => (ConditionStatus::Inconclusive, Some(why.clone())),
            };
            ConditionEntry {
                id: c.id.clone(),
                trace: c.description().to_string(),
                polarity: c.condition.polarity.sign(),
                condition: c.condition.to_string(),
                status,
                vector_id: by_condition.get(c.id.as_str()).map(|v| v.id.clone()),
                reason,
            }
        })
        .collect();
    Ok(CoverageReport {
        function: function.to_string(),
        conditions,
        outcomes,
    })
}

fn percent(part: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        (part as f64 * 10000.0 / total as f64).round() / 100.0
    }
}

impl CoverageReport {
    pub fn counts(&self) -> StatusCounts {
        let mut c = StatusCounts::default();
        for e in &self.conditions {
            match e.status {
                ConditionStatus::VectorGenerated => c.vector_generated += 1,
                ConditionStatus::Infeasible => c.infeasible += 1,
                ConditionStatus::Inconclusive => c.inconclusive += 1,
            }
        }
        c
    }

    pub fn outcome_counts(&self) -> OutcomeCounts {
        let mut c = OutcomeCounts::default();
        for o in &self.outcomes {
            match o.status {
                OutcomeStatus::Pass => c.pass += 1,
                OutcomeStatus::PostViolation => c.post_violation += 1,
                OutcomeStatus::NotTriggered => c.not_triggered += 1,
                OutcomeStatus::ExecError => c.exec_error += 1,
            }
        }
        c
    }

    pub fn to_json(&self) -> Json {
        let counts = self.counts();
        let total = counts.total();
        let mut totals = serde_json::Map::new();
        let mut percentages = serde_json::Map::new();
        totals.insert("conditions".into(), json!(total));
        for s in CONDITION_STATUSES {
            totals.insert(s.name().into(), json!(counts.get(s)));
            percentages.insert(s.name().into(), json!(percent(counts.get(s), total)));
        }
        let conditions: Vec<Json> = self
            .conditions
            .iter()
            .map(|e| {
                json!({
                    "id": e.id,
                    "trace": e.trace,
                    "polarity": e.polarity.to_string(),
                    "condition": e.condition,
                    "status": e.status.name(),
                    "vector": e.vector_id,
                    "reason": e.reason,
                })
            })
            .collect();

        let oc = self.outcome_counts();
        let mut outcome_totals = serde_json::Map::new();
        let mut outcome_percentages = serde_json::Map::new();
        outcome_totals.insert("executed".into(), json!(oc.total()));
        for s in OutcomeStatus::ALL {
            outcome_totals.insert(s.name().into(), json!(oc.get(s)));
            outcome_percentages.insert(s.name().into(), json!(percent(oc.get(s), oc.total())));
        }
        let outcomes: Vec<Json> = self
            .outcomes
            .iter()
            .map(|o| {
                let outputs = o.outputs.as_ref().map(|env| {
                    env.iter()
                        .map(|(k, v)| (k.clone(), value_to_json(v)))
                        .collect::<serde_json::Map<_, _>>()
                });
                json!({
                    "vector": o.vector_id,
                    "condition": o.condition_id,
                    "status": o.status.name(),
                    "outputs": outputs,
                    "violated": o.violated,
                    "detail": o.detail,
                })
            })
            .collect();

        json!({
            "function": self.function,
            "totals": totals,
            "percentages": percentages,
            "conditions": conditions,
            "outcome_totals": outcome_totals,
            "outcome_percentages": outcome_percentages,
            "outcomes": outcomes,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let counts = self.counts();
        writeln!(out, "requirements coverage of {}", self.function).unwrap();
        writeln!(out, "conditions: {}", counts.total()).unwrap();
        for s in CONDITION_STATUSES {
            let n = counts.get(s);
            writeln!(
                out,
                "  {:<17}{:>5}  {:>6.2}%",
                s.name(),
                n,
                percent(n, counts.total())
            )
            .unwrap();
        }
        if !self.conditions.is_empty() {
            out.push('\n');
            out.push_str(&render_conditions(&self.conditions));
        }
        if !self.outcomes.is_empty() {
            let oc = self.outcome_counts();
            writeln!(out, "\nexecuted vectors: {}", oc.total()).unwrap();
            for s in OutcomeStatus::ALL {
                let n = oc.get(s);
                writeln!(
                    out,
                    "  {:<17}{:>5}  {:>6.2}%",
                    s.name(),
                    n,
                    percent(n, oc.total())
                )
                .unwrap();
            }
            out.push('\n');
            for o in &self.outcomes {
                write!(out, "{} {} {}", o.vector_id, o.condition_id, o.status).unwrap();
                if let Some(outputs) = &o.outputs {
                    let shown: Vec<String> =
                        outputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    write!(out, " [{}]", shown.join(", ")).unwrap();
                }
                if let Some(v) = &o.violated {
                    write!(out, " violates {v}").unwrap();
                }
                if let Some(d) = &o.detail {
                    write!(out, ": {d}").unwrap();
                }
                out.push('\n');
            }
        }
        out
    }
}

/// One line per condition: id, polarity, status, vector, trace and the
/// condition itself, separated by tabs.
pub fn render_conditions(entries: &[ConditionEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            e.id,
            e.polarity,
            e.status,
            e.vector_id.as_deref().unwrap_or("-"),
            e.trace,
            e.condition
        )
        .unwrap();
    }
    out
}
