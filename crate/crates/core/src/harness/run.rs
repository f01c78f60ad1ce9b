use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::process::{Child, Stdio};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::{Map, Value as Json};

use super::values::{value_from_json, value_to_json};
use super::TestVector;
use crate::context::CallingContext;
use crate::coverage::TestingCondition;
use crate::expr::{eval_bool, Environment};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);

/// External program implementing the function under test. It receives one
/// JSON object of inputs on a line of standard input and must answer with
/// one JSON object of outputs on a line of standard output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Command {
    pub program: String,
    pub args: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutcomeStatus {
    Pass,
    PostViolation,
    NotTriggered,
    ExecError,
}

impl OutcomeStatus {
    pub const ALL: [OutcomeStatus; 4] = [
        OutcomeStatus::Pass,
        OutcomeStatus::PostViolation,
        OutcomeStatus::NotTriggered,
        OutcomeStatus::ExecError,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OutcomeStatus::Pass => "PASS",
            OutcomeStatus::PostViolation => "POST_VIOLATION",
            OutcomeStatus::NotTriggered => "NOT_TRIGGERED",
            OutcomeStatus::ExecError => "EXEC_ERROR",
        }
    }
}

impl fmt::Display for OutcomeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestOutcome {
    pub vector_id: String,
    pub condition_id: String,
    pub status: OutcomeStatus,
    /// Outputs reported by the implementation, when they could be read.
    pub outputs: Option<Environment>,
    /// Trace of the first violated post-condition.
    pub violated: Option<String>,
    /// What went wrong, for execution errors.
    pub detail: Option<String>,
}

/// Runs `command` on the inputs of `vector` and classifies the result.
/// Post-conditions of `ctx` decide violations; `condition` is the testing
/// condition the vector was generated for.
pub fn run_vector(
    vector: &TestVector,
    ctx: &CallingContext,
    condition: &TestingCondition,
    command: &Command,
    timeout: Duration,
) -> TestOutcome {
    let outcome = |status, outputs, violated, detail| TestOutcome {
        vector_id: vector.id.clone(),
        condition_id: vector.condition_id.clone(),
        status,
        outputs,
        violated,
        detail,
    };
    let outputs = match execute(vector, ctx, command, timeout) {
        Ok(outputs) => outputs,
        Err(detail) => return outcome(OutcomeStatus::ExecError, None, None, Some(detail)),
    };
    let env: Environment = vector
        .inputs
        .iter()
        .chain(outputs.iter())
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if let Some(post) = ctx
        .postconditions
        .iter()
        .find(|p| eval_bool(&p.expr, &env) != Ok(true))
    {
        return outcome(
            OutcomeStatus::PostViolation,
            Some(outputs),
            Some(post.description.clone()),
            None,
        );
    }
    let status = if eval_bool(&condition.to_expr(), &env) == Ok(true) {
        OutcomeStatus::Pass
    } else {
        OutcomeStatus::NotTriggered
    };
    outcome(status, Some(outputs), None, None)
}

/// Runs every vector, in parallel on up to `parallel` workers (0 picks one
/// per core); outcomes follow the order of `jobs`.
pub fn run_all(
    jobs: &[(&TestVector, &TestingCondition)],
    ctx: &CallingContext,
    command: &Command,
    timeout: Duration,
    parallel: usize,
) -> Vec<TestOutcome> {
    let work = || {
        jobs.par_iter()
            .map(|(v, c)| run_vector(v, ctx, c, command, timeout))
            .collect()
    };
    match rayon::ThreadPoolBuilder::new()
        .num_threads(parallel)
        .build()
    {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

fn execute(
    vector: &TestVector,
    ctx: &CallingContext,
    command: &Command,
    timeout: Duration,
) -> Result<Environment, String> {
    let inputs: Map<String, Json> = vector
        .inputs
        .iter()
        .map(|(k, v)| (k.clone(), value_to_json(v)))
        .collect();
    let line = Json::Object(inputs).to_string() + "\n";

    let mut child = std::process::Command::new(&command.program)
        .args(&command.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| format!("cannot start `{}`: {e}", command.program))?;

    let (tx, rx) = mpsc::channel();
    let stdout = child.stdout.take().expect("piped");
    thread::spawn(move || {
        let mut first = String::new();
        let result = BufReader::new(stdout).read_line(&mut first).map(|_| first);
        let _ = tx.send(result);
    });
    let mut stderr = child.stderr.take().expect("piped");
    let (err_tx, err_rx) = mpsc::channel();
    thread::spawn(move || {
        let mut text = String::new();
        let _ = stderr.read_to_string(&mut text);
        let _ = err_tx.send(text);
    });
    if let Some(mut stdin) = child.stdin.take() {
        // The program may exit without reading; its exit status tells.
        let _ = stdin.write_all(line.as_bytes());
    }

    let status = wait(&mut child, timeout)?;
    if !status.success() {
        let stderr = err_rx
            .recv_timeout(Duration::from_millis(200))
            .unwrap_or_default();
        let stderr = stderr.trim();
        return Err(if stderr.is_empty() {
            format!("implementation exited with {status}")
        } else {
            format!("implementation exited with {status}: {stderr}")
        });
    }
    let reply = rx
        .recv_timeout(Duration::from_secs(1))
        .map_err(|_| "implementation kept its output open after exiting".to_string())?
        .map_err(|e| format!("cannot read implementation output: {e}"))?;
    parse_outputs(&reply, ctx)
}

fn wait(child: &mut Child, timeout: Duration) -> Result<std::process::ExitStatus, String> {
    let start = Instant::now();
    loop {
        match child.try_wait() {
            Ok(Some(status)) => return Ok(status),
            Ok(None) if start.elapsed() >= timeout => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(format!("timed out after {} ms", timeout.as_millis()));
            }
            Ok(None) => thread::sleep(Duration::from_millis(2)),
            Err(e) => return Err(format!("cannot wait for implementation: {e}")),
        }
    }
}

fn parse_outputs(reply: &str, ctx: &CallingContext) -> Result<Environment, String> {
    let reply = reply.trim();
    if reply.is_empty() {
        return Err("implementation printed no output line".into());
    }
    let json: Json =
        serde_json::from_str(reply).map_err(|e| format!("malformed output `{reply}`: {e}"))?;
    let Json::Object(fields) = json else {
        return Err(format!("output `{reply}` is not a JSON object"));
    };
    let mut env = Environment::new();
    for p in ctx.spec.outputs() {
        let field = fields
            .get(&p.name)
            .ok_or_else(|| format!("output `{}` missing", p.name))?;
        let value = value_from_json(field, &p.ty)
            .ok_or_else(|| format!("output `{}` = {field} is not a value of its type", p.name))?;
        if !p.ty.contains(&value) {
            return Err(format!(
                "output `{}` = {value} lies outside its type",
                p.name
            ));
        }
        env.bind(p.name.clone(), value);
    }
    Ok(env)
}
