//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Invoked as `acceptance --impl ref` or `acceptance --impl mutant`, the
//! binary instead behaves as an implementation of `constrained_add` for the
//! harness: the mutant answers 9 instead of 10 when the sum saturates.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use serde_json::Value as Json;

use reqcov_core::context::{
    build_context, enumerate_conditions, render_context, CombinationLevel, Segment,
};
use reqcov_core::coverage::{
    compose_ite, mcdc, neg_free, phi, to_ordered, tolerance_extend, Literal, Polarity,
    TestingCondition,
};
use reqcov_core::expr::{
    eval_bool, parse_decimal, ArithOp, Environment, Expr, Kind, Predicate, RelOp, Type, Value,
};
use reqcov_core::solver::{solve_all, SolveResult, SolverConfig, Verdict};
use reqcov_core::speclang::{parse, FunctionSpec};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    if let Some(i) = args.iter().position(|a| a == "--impl") {
        return implementation(args.get(i + 1).map(String::as_str));
    }

    let criteria: [(&str, Check); 11] = [
        ("operator expansion tables", operator_tables),
        ("range conjunction conditions", range_conjunction),
        (
            "conditional requirement conditions",
            conditional_requirement,
        ),
        ("constrained_add end to end", end_to_end),
        ("solver soundness self-check", soundness),
        ("solver completeness on random specs", completeness),
        (
            "partition property on random predicates",
            partition_property,
        ),
        ("independence pairs on random decisions", independence_pairs),
        ("tolerance extension", tolerance),
        ("harness on reference and mutant", harness),
        ("deterministic generation", determinism),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {:>2} {name} ({secs:.2} s): {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name} ({secs:.2} s): {why}", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn implementation(kind: Option<&str>) -> ExitCode {
    let saturated = match kind {
        Some("ref") => 10,
        Some("mutant") => 9,
        _ => return ExitCode::from(2),
    };
    let mut line = String::new();
    if std::io::stdin().lock().read_line(&mut line).is_err() {
        return ExitCode::from(2);
    }
    let Ok(inputs) = serde_json::from_str::<Json>(&line) else {
        return ExitCode::from(2);
    };
    let (Some(m), Some(n)) = (inputs["M"].as_i64(), inputs["N"].as_i64()) else {
        return ExitCode::from(2);
    };
    let res = if m + n <= 10 { m + n } else { saturated };
    println!("{{\"Res\":{res}}}");
    ExitCode::SUCCESS
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture() -> String {
    std::fs::read_to_string(repo_root().join("specs/constrained_add.reqspec")).expect("fixture")
}

fn int_scope(vars: &[(&str, i128, i128)]) -> BTreeMap<String, Type> {
    vars.iter()
        .map(|(n, lo, hi)| (n.to_string(), Type::Int { lo: *lo, hi: *hi }))
        .collect()
}

fn pred(lhs: Expr, op: RelOp, rhs: Expr) -> Predicate {
    Predicate::new(lhs, op, rhs)
}

/// A condition as the set of its literals' text.
fn literal_set(cond: &TestingCondition) -> BTreeSet<String> {
    cond.literals.iter().map(Literal::to_string).collect()
}

fn text_set(text: &str) -> BTreeSet<String> {
    text.split(" && ").map(str::to_string).collect()
}

// Criterion 1.

fn operator_tables() -> Outcome {
    use RelOp::*;
    let negation_free = [
        (Lt, vec![Eq, Gt]),
        (Le, vec![Gt]),
        (Eq, vec![Lt, Gt]),
        (Ge, vec![Lt]),
        (Gt, vec![Eq, Lt]),
        (Ne, vec![Eq]),
    ];
    let ordered = [(Le, vec![Lt, Eq]), (Ge, vec![Gt, Eq]), (Ne, vec![Lt, Gt])];
    let (x, y) = (Expr::var("x"), Expr::var("y"));
    let ops = |parts: Vec<Predicate>| -> Result<BTreeSet<RelOp>, String> {
        ensure!(
            parts.iter().all(|p| *p.lhs == x && *p.rhs == y),
            "operands changed in {parts:?}"
        );
        Ok(parts.into_iter().map(|p| p.op).collect())
    };
    for (op, expected) in &negation_free {
        let got =
            ops(neg_free(&pred(x.clone(), *op, y.clone()), &Kind::Int)
                .map_err(|e| e.to_string())?)?;
        ensure!(
            got == expected.iter().copied().collect(),
            "negation of {op:?} gave {got:?}"
        );
    }
    for (op, expected) in &ordered {
        let got =
            ops(to_ordered(&pred(x.clone(), *op, y.clone()), &Kind::Int)
                .map_err(|e| e.to_string())?)?;
        ensure!(
            got == expected.iter().copied().collect(),
            "ordering of {op:?} gave {got:?}"
        );
    }
    Ok(format!(
        "{} negation rows and {} ordering rows match",
        negation_free.len(),
        ordered.len()
    ))
}

// Criterion 2.

const RANGE_CONDITIONS: [(&str, Polarity); 8] = [
    ("M == 0 && N == 1000", Polarity::DecisionTrue),
    ("M == 0 && N < 1000", Polarity::DecisionTrue),
    ("M > 0 && N == 1000", Polarity::DecisionTrue),
    ("M > 0 && N < 1000", Polarity::DecisionTrue),
    ("M < 0 && N == 1000", Polarity::DecisionFalse),
    ("M < 0 && N < 1000", Polarity::DecisionFalse),
    ("M > 0 && N > 1000", Polarity::DecisionFalse),
    ("M == 0 && N > 1000", Polarity::DecisionFalse),
];

fn range_decision() -> (Expr, BTreeMap<String, Type>) {
    let e = Expr::and(
        Expr::rel(Expr::var("M"), RelOp::Ge, Expr::int(0)),
        Expr::rel(Expr::var("N"), RelOp::Le, Expr::int(1000)),
    );
    (e, int_scope(&[("M", -5000, 5000), ("N", -5000, 5000)]))
}

fn range_conjunction() -> Outcome {
    let (e, scope) = range_decision();
    let set = phi(&e, &scope).map_err(|e| e.to_string())?;
    let got: BTreeSet<(BTreeSet<String>, Polarity)> =
        set.iter().map(|c| (literal_set(c), c.polarity)).collect();
    let expected: BTreeSet<(BTreeSet<String>, Polarity)> = RANGE_CONDITIONS
        .iter()
        .map(|(t, p)| (text_set(t), *p))
        .collect();
    ensure!(set.len() == 8, "expected 8 conditions, got {}", set.len());
    ensure!(got == expected, "got {got:?}");
    Ok("8 conditions, equal as a set, polarities match".into())
}

// Criterion 3.

const ITE_SAT: [&str; 3] = [
    "M + N < 10 && Res == M + N",
    "M + N == 10 && Res == M + N",
    "M + N > 10 && Res == 10",
];

const ITE_UNREACHABLE: [&str; 6] = [
    "M + N < 10 && Res > M + N",
    "M + N < 10 && Res < M + N",
    "M + N == 10 && Res > M + N",
    "M + N == 10 && Res < M + N",
    "M + N > 10 && Res > 10",
    "M + N > 10 && Res < 10",
];

fn fixture_spec() -> Result<FunctionSpec, String> {
    parse(&fixture(), "constrained_add.reqspec")
        .map_err(|e| e.to_string())?
        .into_iter()
        .next()
        .ok_or("empty".into())
}

fn conditional_requirement() -> Outcome {
    let spec = fixture_spec()?;
    let post = &spec.post[0].expr;
    let Expr::Ite(guard, then, other) = post else {
        return Err(format!("fixture post is not a conditional: {post}"));
    };
    let set = compose_ite(post, &spec).map_err(|e| e.to_string())?;
    ensure!(
        set == phi(post, &spec).map_err(|e| e.to_string())?,
        "phi and compose_ite differ"
    );

    let got: BTreeSet<_> = set.iter().map(literal_set).collect();
    let expected: BTreeSet<_> = ITE_SAT
        .iter()
        .chain(&ITE_UNREACHABLE)
        .map(|t| text_set(t))
        .collect();
    ensure!(got == expected, "got {got:?}");

    let g = phi(guard, &spec).map_err(|e| e.to_string())?;
    let (g_plus, g_minus) = (g.plus().count(), g.minus().count());
    let (n_then, n_else) = (
        phi(then, &spec).map_err(|e| e.to_string())?.len(),
        phi(other, &spec).map_err(|e| e.to_string())?.len(),
    );
    ensure!(
        (g_plus, g_minus, n_then, n_else) == (2, 1, 3, 3),
        "split {g_plus}x{n_then} + {g_minus}x{n_else}"
    );
    let guard_text = guard.to_string();
    let strict_guard = guard_text.replace("<=", ">");
    let from_then = set
        .iter()
        .filter(|c| !literal_set(c).contains(&strict_guard))
        .count();
    let from_else = set.len() - from_then;
    ensure!(
        (from_then, from_else) == (6, 3),
        "then/else members {from_then}/{from_else}"
    );
    for c in set.iter() {
        let reachable = ITE_SAT.iter().any(|t| text_set(t) == literal_set(c));
        ensure!(c.polarity.outcome() == reachable, "polarity of {c}");
    }
    Ok(format!(
        "9 conditions = {g_plus}x{n_then} + {g_minus}x{n_else}"
    ))
}

// Criterion 4.

fn values_of(ty: &Type) -> Vec<Value> {
    match ty {
        Type::Int { lo, hi } => (*lo..=*hi).map(Value::Int).collect(),
        Type::Real { lo, hi, step } => {
            let mut out = Vec::new();
            let mut v = lo.clone();
            while &v <= hi {
                out.push(Value::Real(v.clone()));
                v += step;
            }
            out
        }
        Type::Bool => vec![Value::Bool(false), Value::Bool(true)],
        Type::Enum(e) => e
            .literals
            .iter()
            .enumerate()
            .map(|(ordinal, _)| {
                Value::Enum(reqcov_core::expr::EnumValue {
                    ty: e.clone(),
                    ordinal,
                })
            })
            .collect(),
        Type::Char | Type::Str => panic!("oracle covers finite types only"),
    }
}

/// Every assignment satisfying the declared types, preconditions and
/// postconditions of `spec`, in lexicographic order of declaration.
fn admissible(spec: &FunctionSpec) -> Vec<Environment> {
    let domains: Vec<Vec<Value>> = spec.params.iter().map(|p| values_of(&p.ty)).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; domains.len()];
    if domains.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let env: Environment = spec
            .params
            .iter()
            .zip(&idx)
            .zip(&domains)
            .map(|((p, &i), d)| (p.name.clone(), d[i].clone()))
            .collect();
        if spec
            .pre
            .iter()
            .chain(&spec.post)
            .all(|r| eval_bool(&r.expr, &env) == Ok(true))
        {
            out.push(env);
        }
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < domains[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn oracle<'a>(models: &'a [Environment], goal: &TestingCondition) -> Option<&'a Environment> {
    let e = goal.to_expr();
    models.iter().find(|env| eval_bool(&e, env) == Ok(true))
}

/// Independent of the calling context: types, pre, post and the goal.
fn satisfies(spec: &FunctionSpec, goal: &TestingCondition, env: &Environment) -> bool {
    env.len() == spec.params.len()
        && spec
            .params
            .iter()
            .all(|p| env.get(&p.name).is_some_and(|v| p.ty.contains(v)))
        && spec
            .pre
            .iter()
            .chain(&spec.post)
            .all(|r| eval_bool(&r.expr, env) == Ok(true))
        && eval_bool(&goal.to_expr(), env) == Ok(true)
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let spec = fixture_spec()?;
    let ctx = build_context(&spec);
    ensure!(
        render_context(&ctx).contains("\"postcondition at basic_tests.ads:52:20\""),
        "context lacks the trace of the post-condition"
    );
    let conditions: Vec<_> = enumerate_conditions(&ctx, None, CombinationLevel::Single)
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter(|c| c.segment == Segment::Postcondition)
        .collect();
    ensure!(
        conditions.len() == 9,
        "{} post conditions",
        conditions.len()
    );
    let results = solve_all(&ctx, &conditions, &SolverConfig::default());
    let elapsed = start.elapsed();

    let models = admissible(&spec);
    ensure!(
        models.len() == 121,
        "oracle found {} admissible assignments",
        models.len()
    );
    let mut unsat = BTreeSet::new();
    for (c, r) in &results {
        let expected = oracle(&models, &c.condition);
        ensure!(
            r.witness() == expected,
            "{}: solver {:?}, oracle {:?}",
            c.condition,
            r,
            expected
        );
        if r.verdict() == Verdict::Unsat {
            unsat.insert(literal_set(&c.condition));
        }
    }
    let expected_unsat: BTreeSet<_> = ITE_UNREACHABLE.iter().map(|t| text_set(t)).collect();
    ensure!(unsat == expected_unsat, "unsatisfiable set {unsat:?}");
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!(
        "3 SAT, 6 UNSAT, agrees with the 1331-point oracle, solved in {:.3} s",
        elapsed.as_secs_f64()
    ))
}

// Criterion 5.

fn corpus() -> Result<Vec<FunctionSpec>, String> {
    let mut specs = Vec::new();
    let mut files: Vec<_> = std::fs::read_dir(repo_root().join("specs"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "reqspec"))
        .collect();
    files.sort();
    for f in files {
        let text = std::fs::read_to_string(&f).map_err(|e| e.to_string())?;
        specs.extend(parse(&text, &f.display().to_string()).map_err(|e| e.to_string())?);
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    specs.extend((0..20).map(|_| random_spec(&mut rng)));
    Ok(specs)
}

fn soundness() -> Outcome {
    let one = BigRational::from_integer(1.into());
    let mut witnesses = 0;
    let mut specs = 0;
    for spec in corpus()? {
        specs += 1;
        let ctx = build_context(&spec);
        for (sigma, level) in [
            (None, CombinationLevel::Single),
            (Some(&one), CombinationLevel::Pairwise),
        ] {
            let conditions = enumerate_conditions(&ctx, sigma, level)
                .map_err(|e| format!("{}: {e}", spec.name))?;
            for (c, r) in solve_all(&ctx, &conditions, &SolverConfig::default()) {
                if let Some(w) = r.witness() {
                    ensure!(
                        satisfies(&spec, &c.condition, w),
                        "{} {}: witness {w:?} fails",
                        spec.name,
                        c.id
                    );
                    witnesses += 1;
                }
            }
        }
    }
    Ok(format!(
        "{witnesses} witnesses over {specs} specs re-evaluate to true"
    ))
}

// Criterion 6.

const VARS: [&str; 4] = ["p", "q", "r", "s"];

fn random_term(rng: &mut StdRng, vars: &[&str], depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.4) {
        return if rng.random_bool(0.6) {
            Expr::var(vars[rng.random_range(0..vars.len())])
        } else {
            Expr::int(rng.random_range(-4..=12))
        };
    }
    let op = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul][rng.random_range(0..3)];
    Expr::arith(
        op,
        random_term(rng, vars, depth - 1),
        random_term(rng, vars, depth - 1),
    )
}

fn random_pred(rng: &mut StdRng, vars: &[&str]) -> Expr {
    let op = RelOp::ALL[rng.random_range(0..RelOp::ALL.len())];
    let lhs = random_term(rng, vars, 1);
    let rhs = if rng.random_bool(0.15) {
        Expr::ite(
            random_pred(rng, vars),
            random_term(rng, vars, 1),
            random_term(rng, vars, 1),
        )
    } else {
        random_term(rng, vars, 1)
    };
    Expr::rel(lhs, op, rhs)
}

fn random_bool(rng: &mut StdRng, vars: &[&str], depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.35) {
        return random_pred(rng, vars);
    }
    match rng.random_range(0..5) {
        0 => Expr::and(
            random_bool(rng, vars, depth - 1),
            random_bool(rng, vars, depth - 1),
        ),
        1 => Expr::or(
            random_bool(rng, vars, depth - 1),
            random_bool(rng, vars, depth - 1),
        ),
        2 => Expr::not(random_bool(rng, vars, depth - 1)),
        _ => Expr::ite(
            random_bool(rng, vars, depth - 1),
            random_bool(rng, vars, depth - 1),
            random_bool(rng, vars, depth - 1),
        ),
    }
}

/// Three or four integer variables, at least one input and one output,
/// total domain product at most 10^5.
fn random_spec(rng: &mut StdRng) -> FunctionSpec {
    loop {
        let n = rng.random_range(3..=4);
        let mut text = String::from("function random\n");
        let mut product: u64 = 1;
        let mut inputs = Vec::new();
        for (i, name) in VARS.iter().take(n).enumerate() {
            let lo = rng.random_range(-5..=5);
            let size = rng.random_range(1..=if n == 3 { 30 } else { 12 });
            product *= size as u64;
            let dir = if i == 0 || (i < n - 1 && rng.random_bool(0.5)) {
                "in"
            } else {
                "out"
            };
            if dir == "in" {
                inputs.push(*name);
            }
            text += &format!("  {dir} {name}: int range {lo} .. {}\n", lo + size - 1);
        }
        assert!(product <= 100_000);
        if rng.random_bool(0.5) {
            text += &format!("  pre: {}\n", random_bool(rng, &inputs, 1));
        }
        let all = &VARS[..n];
        for _ in 0..rng.random_range(1..=2) {
            text += &format!("  post: {}\n", random_bool(rng, all, 2));
        }
        if let Ok(mut specs) = parse(&text, "random.reqspec") {
            return specs.remove(0);
        }
    }
}

fn completeness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20_24);
    let (mut conditions_checked, mut sat, mut unsat) = (0, 0, 0);
    let specs = 24;
    for _ in 0..specs {
        let spec = random_spec(&mut rng);
        let product: u128 = spec
            .params
            .iter()
            .map(|p| values_of(&p.ty).len() as u128)
            .product();
        ensure!(product <= 100_000, "domain product {product}");
        let models = admissible(&spec);
        let ctx = build_context(&spec);
        let conditions = enumerate_conditions(&ctx, None, CombinationLevel::Single)
            .map_err(|e| e.to_string())?;
        for (c, r) in solve_all(&ctx, &conditions, &SolverConfig::default()) {
            let expected = oracle(&models, &c.condition);
            ensure!(
                r.witness() == expected,
                "{}\ncondition {}: solver {:?}, oracle {:?}",
                reqcov_core::speclang::print(&spec),
                c.condition,
                r,
                expected
            );
            conditions_checked += 1;
            match r {
                SolveResult::Sat(_) => sat += 1,
                _ => unsat += 1,
            }
        }
    }
    Ok(format!(
        "{specs} specs, {conditions_checked} conditions ({sat} SAT, {unsat} UNSAT) match the exhaustive oracle, witnesses included"
    ))
}

// Criterion 7.

fn partition_property() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut envs_checked = 0u64;
    for _ in 0..1000 {
        let (xl, xs) = (rng.random_range(-10..=10), rng.random_range(1..=50));
        let (yl, ys) = (rng.random_range(-10..=10), rng.random_range(1..=50));
        let p = match random_pred(&mut rng, &["x", "y"]) {
            Expr::Pred(p) => p,
            other => return Err(format!("not a predicate: {other}")),
        };
        let parts = [
            (to_ordered(&p, &Kind::Int).map_err(|e| e.to_string())?, true),
            (neg_free(&p, &Kind::Int).map_err(|e| e.to_string())?, false),
        ];
        let whole = Expr::Pred(p.clone());
        for x in xl..xl + xs {
            for y in yl..yl + ys {
                let env = Environment::new()
                    .with("x", Value::Int(x))
                    .with("y", Value::Int(y));
                let truth = eval_bool(&whole, &env).map_err(|e| e.to_string())?;
                for (members, same) in &parts {
                    let hits = members
                        .iter()
                        .filter(|m| eval_bool(&Expr::Pred((*m).clone()), &env) == Ok(true))
                        .count();
                    ensure!(
                        hits == (truth == *same) as usize,
                        "{p} at x={x}, y={y}: {hits} members hold"
                    );
                }
                envs_checked += 1;
            }
        }
    }
    Ok(format!(
        "1000 predicates, {envs_checked} assignments, equivalent and pairwise disjoint"
    ))
}

// Criterion 8.

fn random_decision(rng: &mut StdRng, atoms: &mut Vec<Expr>, read_once: bool) -> Expr {
    let pool: Vec<Expr> = ["a", "b", "c", "d"]
        .iter()
        .map(|v| Expr::var(*v))
        .chain((0..4).map(|k| Expr::rel(Expr::var("x"), RelOp::ALL[k], Expr::int(k as i128))))
        .collect();
    fn build(rng: &mut StdRng, leaves: usize, pick: &mut dyn FnMut(&mut StdRng) -> Expr) -> Expr {
        let e = if leaves == 1 {
            pick(rng)
        } else {
            let left = rng.random_range(1..leaves);
            let (a, b) = (build(rng, left, pick), build(rng, leaves - left, pick));
            if rng.random_bool(0.5) {
                Expr::and(a, b)
            } else {
                Expr::or(a, b)
            }
        };
        if rng.random_bool(0.25) {
            Expr::not(e)
        } else {
            e
        }
    }
    let leaves = rng.random_range(1..=4);
    let mut pick = |rng: &mut StdRng| loop {
        let candidate = pool[rng.random_range(0..pool.len())].clone();
        if !read_once || !atoms.contains(&candidate) {
            atoms.push(candidate.clone());
            return candidate;
        }
    };
    build(rng, leaves, &mut pick)
}

fn substitute(e: &Expr, atoms: &[Expr], values: &[bool]) -> Expr {
    if let Some(i) = atoms.iter().position(|a| a == e) {
        return Expr::bool(values[i]);
    }
    match e {
        Expr::Not(x) => Expr::not(substitute(x, atoms, values)),
        Expr::And(x, y) => Expr::and(substitute(x, atoms, values), substitute(y, atoms, values)),
        Expr::Or(x, y) => Expr::or(substitute(x, atoms, values), substitute(y, atoms, values)),
        other => other.clone(),
    }
}

fn independence_pairs() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let mut scope = int_scope(&[("x", -5, 5)]);
    for v in ["a", "b", "c", "d"] {
        scope.insert(v.into(), Type::Bool);
    }
    let (mut decisions, mut masked) = (0, 0);
    for round in 0..600 {
        let read_once = round % 2 == 0;
        let mut used = Vec::new();
        let d = random_decision(&mut rng, &mut used, read_once);
        let m = mcdc(&d, &scope).map_err(|e| e.to_string())?;
        let atoms: Vec<Expr> = m
            .conditions
            .iter()
            .map(|a| Literal::pos(a.clone()).to_expr())
            .collect();
        ensure!(atoms.len() <= 4, "{d} has {} conditions", atoms.len());
        let outcome =
            |values: &[bool]| eval_bool(&substitute(&d, &atoms, values), &Environment::new());
        for row in &m.rows {
            ensure!(
                outcome(&row.values) == Ok(row.outcome),
                "row {:?} of {d}",
                row.values
            );
        }
        let table: Vec<Vec<bool>> = (0..1u32 << atoms.len())
            .map(|bits| {
                (0..atoms.len())
                    .map(|j| bits >> (atoms.len() - 1 - j) & 1 == 1)
                    .collect()
            })
            .collect();
        let has_pair = |rows: &[Vec<bool>], i: usize| {
            rows.iter().any(|r| {
                rows.iter().any(|s| {
                    (0..atoms.len()).all(|j| (j == i) != (r[j] == s[j])) && outcome(r) != outcome(s)
                })
            })
        };
        let rows: Vec<Vec<bool>> = m.rows.iter().map(|r| r.values.clone()).collect();
        for (i, atom) in m.conditions.iter().enumerate() {
            let coverable = has_pair(&table, i);
            ensure!(
                !read_once || coverable,
                "condition {i} of read-once {d} is masked"
            );
            ensure!(
                coverable != m.uncoverable.contains(atom),
                "coverability of condition {i} in {d}"
            );
            if coverable {
                ensure!(
                    has_pair(&rows, i),
                    "no independence pair for condition {i} of {d}"
                );
            } else {
                masked += 1;
            }
        }
        decisions += 1;
    }
    Ok(format!("{decisions} decisions; every coverable condition has its pair ({masked} masked conditions reported)"))
}

// Criterion 9.

/// One boundary condition per strict literal: `a < b` gains `a == b - 1`,
/// `a > b` gains `a == b + 1`, constants folded.
fn boundary_by_rule(cond: &str) -> Vec<String> {
    let literals: Vec<&str> = cond.split(" && ").collect();
    let mut out = Vec::new();
    for (i, lit) in literals.iter().enumerate() {
        let parts: Vec<&str> = lit.split(' ').collect();
        let [var, op, value] = parts[..] else {
            continue;
        };
        let value: i128 = value.parse().expect("constant bound");
        let moved = match op {
            "<" => value - 1,
            ">" => value + 1,
            _ => continue,
        };
        let mut lits: Vec<String> = literals.iter().map(|l| l.to_string()).collect();
        lits[i] = format!("{var} == {moved}");
        out.push(lits.join(" && "));
    }
    out
}

fn tolerance() -> Outcome {
    let (e, scope) = range_decision();
    let base = phi(&e, &scope).map_err(|e| e.to_string())?;
    let sigma = parse_decimal("1").unwrap();
    let extended = tolerance_extend(&base, &sigma, &scope).map_err(|e| e.to_string())?;

    let strict_occurrences: usize = RANGE_CONDITIONS
        .iter()
        .map(|(t, _)| {
            t.split(" && ")
                .filter(|l| l.contains(" < ") || l.contains(" > "))
                .count()
        })
        .sum();
    let mut expected: BTreeSet<BTreeSet<String>> =
        RANGE_CONDITIONS.iter().map(|(t, _)| text_set(t)).collect();
    let mut extra_by_rule = 0;
    for (t, _) in RANGE_CONDITIONS {
        for b in boundary_by_rule(t) {
            expected.insert(text_set(&b));
            extra_by_rule += 1;
        }
    }
    let got: BTreeSet<_> = extended.iter().map(literal_set).collect();
    let base_set: BTreeSet<_> = base.iter().map(literal_set).collect();
    ensure!(
        base_set.is_subset(&got) && got.len() > base_set.len(),
        "not a strict superset"
    );
    ensure!(
        extra_by_rule == strict_occurrences,
        "rule produced {extra_by_rule} for {strict_occurrences} occurrences"
    );
    ensure!(got == expected, "got {got:?}");
    ensure!(
        extended.len() == 8 + strict_occurrences,
        "{} conditions",
        extended.len()
    );
    Ok(format!(
        "8 + {strict_occurrences} = {} conditions, matching the boundary rule",
        extended.len()
    ))
}

// Criteria 10 and 11.

fn reqcov(args: &[&str]) -> Result<(i32, String), String> {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_reqcov"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    ))
}

fn read_json(path: &Path) -> Result<Json, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn conservation(report: &Json) -> Result<(), String> {
    let t = &report["totals"];
    let sum: u64 = ["VECTOR_GENERATED", "INFEASIBLE", "INCONCLUSIVE"]
        .iter()
        .map(|k| t[k].as_u64().unwrap_or(0))
        .sum();
    ensure!(Some(sum) == t["conditions"].as_u64(), "totals {t}");
    ensure!(
        report["conditions"].as_array().map(Vec::len)
            == t["conditions"].as_u64().map(|n| n as usize),
        "entries"
    );
    let o = &report["outcome_totals"];
    let executed: u64 = ["PASS", "POST_VIOLATION", "NOT_TRIGGERED", "EXEC_ERROR"]
        .iter()
        .map(|k| o[k].as_u64().unwrap_or(0))
        .sum();
    ensure!(
        Some(executed) == o["executed"].as_u64(),
        "outcome totals {o}"
    );
    Ok(())
}

fn harness() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().to_str().unwrap();
    let spec = repo_root().join("specs/constrained_add.reqspec");
    let spec = spec.to_str().unwrap();
    let me = std::env::current_exe().map_err(|e| e.to_string())?;
    let me = me.to_str().unwrap();
    let vectors = format!("{out}/constrained_add.vectors.xml");

    let (code, _) = reqcov(&["generate", spec, "--out-dir", out])?;
    ensure!(code == 0, "generate exited {code}");
    let generated = read_json(&dir.path().join("constrained_add.report.json"))?;
    conservation(&generated)?;
    let n_vectors = generated["totals"]["VECTOR_GENERATED"]
        .as_u64()
        .unwrap_or(0);

    let (code, _) = reqcov(&[
        "run",
        spec,
        "--vectors",
        &vectors,
        "--out-dir",
        out,
        "--",
        me,
        "--impl",
        "ref",
    ])?;
    let run = read_json(&dir.path().join("constrained_add.run.json"))?;
    conservation(&run)?;
    ensure!(code == 0, "reference run exited {code}: {run}");
    ensure!(
        run["outcome_totals"]["PASS"].as_u64() == Some(n_vectors),
        "reference outcomes {}",
        run["outcome_totals"]
    );

    let (code, _) = reqcov(&[
        "run",
        spec,
        "--vectors",
        &vectors,
        "--out-dir",
        out,
        "--",
        me,
        "--impl",
        "mutant",
    ])?;
    let run = read_json(&dir.path().join("constrained_add.run.json"))?;
    conservation(&run)?;
    ensure!(code == 3, "mutant run exited {code}");
    let xml = std::fs::read_to_string(&vectors).map_err(|e| e.to_string())?;
    let spec_ast = fixture_spec()?;
    let parsed =
        reqcov_core::harness::import_vectors(&xml, &spec_ast).map_err(|e| e.to_string())?;
    let mut saturating = 0;
    for o in run["outcomes"].as_array().ok_or("no outcomes")? {
        let v = parsed
            .iter()
            .find(|v| Some(v.id.as_str()) == o["vector"].as_str())
            .ok_or("unknown vector")?;
        let sum: i128 = ["M", "N"]
            .iter()
            .map(|n| match v.inputs.get(n) {
                Some(Value::Int(i)) => *i,
                _ => 0,
            })
            .sum();
        let expected = if sum > 10 { "POST_VIOLATION" } else { "PASS" };
        ensure!(
            o["status"] == expected,
            "vector {} with M + N = {sum}: {}",
            v.id,
            o["status"]
        );
        saturating += (sum > 10) as usize;
    }
    ensure!(saturating > 0, "no vector with M + N > 10");
    Ok(format!(
        "reference passes {n_vectors}/{n_vectors}; mutant violates on {saturating} saturating vector(s), passes the rest"
    ))
}

fn determinism() -> Outcome {
    let dirs = [
        tempfile::tempdir().map_err(|e| e.to_string())?,
        tempfile::tempdir().map_err(|e| e.to_string())?,
    ];
    let mut files = 0;
    let mut specs: Vec<_> = std::fs::read_dir(repo_root().join("specs"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    specs.sort();
    for spec in &specs {
        let spec = spec.to_str().unwrap();
        for (dir, parallel) in dirs.iter().zip(["1", "8"]) {
            let out = dir.path().to_str().unwrap();
            let (code, _) = reqcov(&[
                "generate",
                spec,
                "--sigma",
                "1",
                "--combination-level",
                "2",
                "--parallel",
                parallel,
                "--out-dir",
                out,
            ])?;
            ensure!(code == 0, "generate {spec} exited {code}");
        }
    }
    let mut names: Vec<_> = std::fs::read_dir(dirs[0].path())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    for name in names {
        let a = std::fs::read(dirs[0].path().join(&name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(dirs[1].path().join(&name)).map_err(|e| format!("{name:?}: {e}"))?;
        ensure!(a == b, "{name:?} differs between runs");
        files += 1;
    }
    ensure!(files >= 3 * specs.len(), "only {files} files");
    Ok(format!(
        "{files} files byte-identical across two runs with 1 and 8 workers"
    ))
}
