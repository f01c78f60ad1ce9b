//! `reqcov`: requirements-based test generation from the command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use reqcov_core::context::{
    build_context, enumerate_conditions, render_context, CallingContext, CombinationLevel,
    ContextCondition,
};
use reqcov_core::expr::parse_decimal;
use reqcov_core::harness::{
    export_vectors, import_vectors, make_report, render_conditions, run_all, vectors_from_results,
    vectors_function, Command, CoverageReport, OutcomeStatus, TestVector,
};
use reqcov_core::solver::{solve_all, verify_witness, SolveResult, SolverConfig};
use reqcov_core::speclang::{parse, FunctionSpec};

const EXIT_INPUT_ERROR: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_TEST_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "reqcov",
    version,
    about = "Generate and run requirements-based tests"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Derive testing conditions, solve them and write test vectors.
    Generate {
        #[command(flatten)]
        common: Common,
        /// Also write the calling context of each function.
        #[arg(long)]
        emit_context: bool,
    },
    /// Execute an implementation against previously generated vectors.
    Run {
        #[command(flatten)]
        common: Common,
        /// Vectors file written by `generate`.
        #[arg(long)]
        vectors: PathBuf,
        /// Seconds allowed per execution.
        #[arg(long, default_value = "5", value_parser = parse_timeout)]
        timeout: Duration,
        /// Implementation under test and its arguments.
        #[arg(last = true, value_name = "COMMAND")]
        command: Vec<String>,
    },
    /// Print the calling context of each function.
    ShowContext {
        spec: PathBuf,
        /// Only this function.
        #[arg(long)]
        function: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Requirements file.
    spec: PathBuf,
    /// Only this function.
    #[arg(long)]
    function: Option<String>,
    /// Add boundary conditions at this distance from strict comparisons.
    #[arg(long, value_parser = parse_sigma)]
    sigma: Option<BigRational>,
    /// 2 also combines the conditions of each pair of inputs.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    combination_level: u8,
    /// Search nodes per condition before it is declared inconclusive.
    #[arg(long, default_value_t = SolverConfig::default().max_nodes)]
    max_nodes: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    parallel: usize,
    /// Directory for the files written.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Format of the summary on standard output.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn parse_sigma(text: &str) -> Result<BigRational, String> {
    let sigma = parse_decimal(text).ok_or_else(|| format!("`{text}` is not a decimal number"))?;
    if sigma > BigRational::from_integer(0.into()) {
        Ok(sigma)
    } else {
        Err("sigma must be positive".into())
    }
}

fn parse_timeout(text: &str) -> Result<Duration, String> {
    match text.parse::<f64>() {
        Ok(secs) if secs > 0.0 && secs.is_finite() => Ok(Duration::from_secs_f64(secs)),
        _ => Err(format!("`{text}` is not a positive number of seconds")),
    }
}

/// Failure that ends the command with an exit code.
struct Fail(u8, String);

fn input_error(message: impl Into<String>) -> Fail {
    Fail(EXIT_INPUT_ERROR, message.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Cmd::Generate {
            common,
            emit_context,
        } => generate(&common, emit_context),
        Cmd::Run {
            common,
            vectors,
            timeout,
            command,
        } => run(&common, &vectors, timeout, &command),
        Cmd::ShowContext { spec, function } => show_context(&spec, function.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn load(path: &Path, function: Option<&str>) -> Result<Vec<FunctionSpec>, Fail> {
    let text = fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let specs =
        parse(&text, &path.display().to_string()).map_err(|e| input_error(e.to_string()))?;
    match function {
        None => Ok(specs),
        Some(name) => {
            let chosen: Vec<_> = specs.into_iter().filter(|s| s.name == name).collect();
            if chosen.is_empty() {
                Err(input_error(format!(
                    "{} declares no function `{name}`",
                    path.display()
                )))
            } else {
                Ok(chosen)
            }
        }
    }
}

fn solver_config(common: &Common) -> SolverConfig {
    SolverConfig {
        max_nodes: common.max_nodes,
        parallel: common.parallel,
    }
}

fn level(common: &Common) -> CombinationLevel {
    CombinationLevel::try_from(common.combination_level).expect("validated by the argument parser")
}

struct Analysis {
    ctx: CallingContext,
    conditions: Vec<ContextCondition>,
    results: Vec<SolveResult>,
}

impl Analysis {
    fn new(spec: &FunctionSpec, common: &Common) -> Result<Self, Fail> {
        let ctx = build_context(spec);
        let conditions = enumerate_conditions(&ctx, common.sigma.as_ref(), level(common))
            .map_err(|e| input_error(format!("function `{}`: {e}", spec.name)))?;
        let results = solve_all(&ctx, &conditions, &solver_config(common))
            .into_iter()
            .map(|(_, r)| r)
            .collect();
        Ok(Analysis {
            ctx,
            conditions,
            results,
        })
    }

    fn pairs(&self) -> Vec<(&ContextCondition, SolveResult)> {
        self.conditions
            .iter()
            .zip(self.results.iter().cloned())
            .collect()
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Fail> {
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<(), Fail> {
    fs::create_dir_all(dir)
        .map_err(|e| input_error(format!("cannot create {}: {e}", dir.display())))
}

/// Writes to standard output, ignoring a reader that went away.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_reports(reports: &[CoverageReport], format: Format) {
    match format {
        Format::Text => {
            let texts: Vec<String> = reports.iter().map(CoverageReport::to_text).collect();
            emit(&texts.join("\n"));
        }
        Format::Json => {
            let all: Vec<_> = reports.iter().map(CoverageReport::to_json).collect();
            emit(&(serde_json::to_string_pretty(&all).expect("serialisable") + "\n"));
        }
    }
}

fn generate(common: &Common, emit_context: bool) -> Result<u8, Fail> {
    let specs = load(&common.spec, common.function.as_deref())?;
    create_dir(&common.out_dir)?;
    let mut reports = Vec::new();
    for spec in &specs {
        let a = Analysis::new(spec, common)?;
        let pairs = a.pairs();
        let vectors = vectors_from_results(&a.ctx, &pairs);
        let report = make_report(&spec.name, &pairs, &vectors, vec![])
            .map_err(|e| input_error(e.to_string()))?;
        let dir = &common.out_dir;
        write(
            dir,
            &format!("{}.vectors.xml", spec.name),
            &export_vectors(&spec.name, &vectors),
        )?;
        write(
            dir,
            &format!("{}.conditions.txt", spec.name),
            &render_conditions(&report.conditions),
        )?;
        write(
            dir,
            &format!("{}.report.json", spec.name),
            &json_file(&report),
        )?;
        if emit_context {
            write(
                dir,
                &format!("{}.context.txt", spec.name),
                &render_context(&a.ctx),
            )?;
        }
        reports.push(report);
    }
    print_reports(&reports, common.format);
    let inconclusive = reports.iter().any(|r| r.counts().inconclusive > 0);
    Ok(if inconclusive { EXIT_INCONCLUSIVE } else { 0 })
}

fn json_file(report: &CoverageReport) -> String {
    serde_json::to_string_pretty(&report.to_json()).expect("serialisable") + "\n"
}

fn run(
    common: &Common,
    vectors_path: &Path,
    timeout: Duration,
    command: &[String],
) -> Result<u8, Fail> {
    let Some((program, args)) = command.split_first() else {
        return Err(input_error("no implementation given; pass it after `--`"));
    };
    if !is_executable(program) {
        return Err(input_error(format!(
            "cannot find implementation `{program}`"
        )));
    }
    let command = Command {
        program: program.clone(),
        args: args.to_vec(),
    };

    let xml = fs::read_to_string(vectors_path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", vectors_path.display())))?;
    let function = vectors_function(&xml)
        .map_err(|e| input_error(format!("{}: {e}", vectors_path.display())))?;
    if common.function.as_deref().is_some_and(|f| f != function) {
        return Err(input_error(format!(
            "{} holds vectors for `{function}`",
            vectors_path.display()
        )));
    }
    let spec = load(&common.spec, Some(&function))?.remove(0);
    let vectors = import_vectors(&xml, &spec)
        .map_err(|e| input_error(format!("{}: {e}", vectors_path.display())))?;

    let a = Analysis::new(&spec, common)?;
    let jobs = match_vectors(&a, &vectors)?;
    let outcomes = run_all(&jobs, &a.ctx, &command, timeout, common.parallel);
    let report = make_report(&spec.name, &a.pairs(), &vectors, outcomes)
        .map_err(|e| input_error(e.to_string()))?;

    create_dir(&common.out_dir)?;
    write(
        &common.out_dir,
        &format!("{}.run.json", spec.name),
        &json_file(&report),
    )?;
    print_reports(std::slice::from_ref(&report), common.format);

    let counts = report.outcome_counts();
    Ok(if counts.post_violation + counts.exec_error > 0 {
        EXIT_TEST_FAILURE
    } else if counts.get(OutcomeStatus::NotTriggered) > 0 {
        EXIT_INCONCLUSIVE
    } else {
        0
    })
}

/// Pairs each vector with the condition it was generated for, rejecting
/// vectors whose condition differs under the current options.
fn match_vectors<'a>(
    a: &'a Analysis,
    vectors: &'a [TestVector],
) -> Result<Vec<(&'a TestVector, &'a reqcov_core::coverage::TestingCondition)>, Fail> {
    let hint = "generated with different --sigma or --combination-level?";
    vectors
        .iter()
        .map(|v| {
            let c = a
                .conditions
                .iter()
                .find(|c| c.id == v.condition_id)
                .ok_or_else(|| {
                    input_error(format!(
                        "vector `{}` names unknown condition `{}`; {hint}",
                        v.id, v.condition_id
                    ))
                })?;
            let model = v
                .inputs
                .iter()
                .chain(v.witness.iter())
                .map(|(k, x)| (k.clone(), x.clone()))
                .collect();
            if c.description() != v.trace || !verify_witness(&a.ctx, &c.condition, &model) {
                return Err(input_error(format!(
                    "vector `{}` does not satisfy condition `{}`; {hint}",
                    v.id, v.condition_id
                )));
            }
            Ok((v, &c.condition))
        })
        .collect()
}

fn is_executable(program: &str) -> bool {
    let path = Path::new(program);
    if path.components().count() > 1 {
        return path.is_file();
    }
    std::env::var_os("PATH")
        .map(|paths| std::env::split_paths(&paths).any(|dir| dir.join(program).is_file()))
        .unwrap_or(false)
}

fn show_context(spec: &Path, function: Option<&str>) -> Result<u8, Fail> {
    let specs = load(spec, function)?;
    let texts: Vec<String> = specs
        .iter()
        .map(|s| render_context(&build_context(s)))
        .collect();
    emit(&texts.join("\n"));
    Ok(0)
}
