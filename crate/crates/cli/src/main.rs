//! `eufactor` command-line front end.
//!
//! Exit codes: 0 success, 2 an axiom fails, 3 belief not independent,
//! 4 input error, 5 fit did not converge.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use eufactor::generators::{gen_agent, gen_correlated_counterexample, AgentConfig, BeliefStructure, ComparisonPlan};
use eufactor::representation::{factorize_from, DEFAULT_FACTORIZE_TOL};
use eufactor::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

const EXIT_AXIOM_FAILURE: u8 = 2;
const EXIT_NOT_INDEPENDENT: u8 = 3;
const EXIT_INPUT: u8 = 4;
const EXIT_NOT_CONVERGED: u8 = 5;

#[derive(Parser)]
#[command(name = "eufactor", version, about = "Check, evaluate, factorize and fit expected-utility representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the hypotheses of a representation theorem on a dataset.
    Check(CheckArgs),
    /// Evaluate alternatives under a representation.
    Evaluate(EvaluateArgs),
    /// Test whether a joint belief is a product of its marginals.
    Factorize(FactorizeArgs),
    /// Fit a representation to a dataset.
    Fit(FitArgs),
    /// Generate a synthetic dataset.
    Gen(GenArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Dataset JSON.
    data: PathBuf,
    /// 1 for prospects, 2 for plans; inferred from the data by default.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    theorem: Option<u8>,
    #[arg(long, value_enum, default_value_t = StageArg::Product)]
    stage: StageArg,
    /// Evidence below which a passing check is reported vacuous.
    #[arg(long, default_value_t = 1)]
    min_evidence: usize,
    #[arg(long, default_value_t = 64)]
    max_witnesses: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Representation JSON.
    representation: PathBuf,
    /// A prospect, a plan, a list of them, or a dataset.
    alternatives: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FactorizeArgs {
    /// Belief JSON: `{"pi": [[..]]}` or `{"p": [..], "q": [..]}`.
    belief: PathBuf,
    /// Defaults to EUFACTOR_TOL if set, else 1e-9.
    #[arg(long)]
    tol: Option<f64>,
    /// Reference row for the conditional `q`.
    #[arg(long, default_value_t = 0)]
    s0: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FitArgs {
    /// Dataset JSON.
    data: PathBuf,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long, default_value_t = 1e-3)]
    margin: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Convergence tolerance on the objective decrease.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Where to write the fitted representation (default: `<data>.fit.json`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Product2d)]
    model: ModelArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `3x3` for prospects, `2x2x2` for plans.
    #[arg(long, default_value = "3x3")]
    space: String,
    /// Comma-separated consequences.
    #[arg(long, default_value = "0,1,2,3")]
    grid: String,
    #[arg(long, default_value_t = 60)]
    size: usize,
    /// Sample this many comparisons instead of all pairs.
    #[arg(long)]
    sample: Option<usize>,
    /// Force a correlated belief with at least this 2x2 minor.
    #[arg(long)]
    min_minor: Option<f64>,
    /// Force a product belief even for joint models.
    #[arg(long, conflicts_with = "min_minor")]
    product_belief: bool,
    /// Emit the correlated-belief counterexample instead of an agent.
    #[arg(long)]
    counterexample: bool,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    xi: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    xi_prime: f64,
    /// Joint belief rows for --counterexample, e.g. `0.4,0.1;0.1,0.4`.
    #[arg(long, default_value = "0.4,0.1;0.1,0.4")]
    pi: String,
    /// Dataset destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the generating representation here.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StageArg {
    Joint,
    Product,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Product2d,
    Joint2d,
    Joint3d,
    Product3d,
}

impl From<ModelArg> for RepresentationKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Product2d => RepresentationKind::Product2D,
            ModelArg::Joint2d => RepresentationKind::Joint2D,
            ModelArg::Joint3d => RepresentationKind::Joint3D,
            ModelArg::Product3d => RepresentationKind::Product3D,
        }
    }
}

/// An error carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<eufactor::Error> for Failure {
    fn from(e: eufactor::Error) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::input(format!("{e:#}"))
    }
}

type Outcome = Result<u8, Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).context("serializing output")?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    println!("{}", serde_json::to_string_pretty(value).context("serializing output")?);
    Ok(())
}

fn env_tolerance() -> Result<Option<f64>, Failure> {
    match std::env::var("EUFACTOR_TOL") {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| *t >= 0.0 && t.is_finite())
            .map(Some)
            .ok_or_else(|| Failure::input(format!("EUFACTOR_TOL must be a nonnegative number, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

#[derive(Serialize, Deserialize)]
struct CheckOutput {
    theorem: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    stage: Option<Stage>,
    verdict: ReportVerdict,
    reports: Vec<AxiomReport>,
}

fn table(reports: &[AxiomReport]) -> String {
    let width = reports.iter().map(|r| r.axiom.len()).max().unwrap_or(5).max(5);
    let mut out = format!("{:<width$}  {:<7}  {:>8}  {:>9}  detail\n", "check", "verdict", "coverage", "witnesses");
    for r in reports {
        let _ = writeln!(
            out,
            "{:<width$}  {:<7}  {:>8}  {:>9}  {}",
            r.axiom,
            r.verdict.to_string(),
            r.coverage,
            r.witnesses.len(),
            r.detail.as_deref().unwrap_or("")
        );
    }
    out
}

fn check(args: CheckArgs) -> Outcome {
    let data: PreferenceDataset = read_json(&args.data)?;
    let theorem = args.theorem.unwrap_or(if data.has_periods() { 2 } else { 1 });
    let opts = CheckOptions { min_evidence: args.min_evidence, max_witnesses: args.max_witnesses, ..CheckOptions::default() };
    let (reports, stage) = if theorem == 1 {
        (check_theorem1_hypotheses(&data, &opts)?, None)
    } else {
        let stage = match args.stage {
            StageArg::Joint => Stage::Joint,
            StageArg::Product => Stage::Product,
        };
        (check_theorem2_hypotheses(&data, stage, &opts)?, Some(stage))
    };
    let verdict = summarize(&reports);
    if args.json {
        print_json(&CheckOutput { theorem, stage, verdict, reports })?;
    } else {
        print!("{}", table(&reports));
        for r in reports.iter().filter(|r| !r.witnesses.is_empty()) {
            println!("{} witness: {}", r.axiom, serde_json::to_string(&r.witnesses[0]).context("serializing witness")?);
        }
        println!("overall: {verdict}");
    }
    Ok(if verdict == ReportVerdict::Fail { EXIT_AXIOM_FAILURE } else { 0 })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Alternatives {
    Dataset(PreferenceDataset),
    One(Alternative),
    Many(Vec<Alternative>),
}

fn evaluate(args: EvaluateArgs) -> Outcome {
    let rep: EURepresentation = read_json(&args.representation)?;
    let xs = match read_json::<Alternatives>(&args.alternatives)? {
        Alternatives::Dataset(d) => d.universe().to_vec(),
        Alternatives::One(x) => vec![x],
        Alternatives::Many(xs) => xs,
    };
    let values = rep.evaluate_all(&xs, Execution::default())?;
    if args.json {
        print_json(&serde_json::json!({ "values": values }))?;
    } else {
        for (k, v) in values.iter().enumerate() {
            println!("{k}\t{v}");
        }
    }
    Ok(0)
}

fn factorize_cmd(args: FactorizeArgs) -> Outcome {
    let belief: Belief = read_json(&args.belief)?;
    let tol = match args.tol {
        Some(t) => t,
        None => env_tolerance()?.unwrap_or(DEFAULT_FACTORIZE_TOL),
    };
    let result = factorize_from(&belief.to_joint(), tol, args.s0)?;
    if args.json {
        print_json(&result)?;
    } else {
        println!("outcome: {:?}", result.outcome);
        println!("p: {:?}", result.p);
        println!("q: {:?}", result.q);
        println!("max minor: {:e}  max residual: {:e}  tolerance: {:e}", result.max_minor, result.max_residual, tol);
        if !result.is_product() {
            println!("witness: {}", serde_json::to_string(&result.witness).context("serializing witness")?);
        }
    }
    Ok(if result.is_product() { 0 } else { EXIT_NOT_INDEPENDENT })
}

fn default_fit_path(data: &Path) -> PathBuf {
    let stem = data.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "data".into());
    data.with_file_name(format!("{stem}.fit.json"))
}

fn fit_cmd(args: FitArgs) -> Outcome {
    let data: PreferenceDataset = read_json(&args.data)?;
    let model = args.model.map(RepresentationKind::from).unwrap_or(if data.has_periods() {
        RepresentationKind::Joint3D
    } else {
        RepresentationKind::Product2D
    });
    let cfg = FitConfig {
        model,
        margin: args.margin,
        seed: args.seed,
        max_outer_iterations: args.max_iter,
        convergence_tol: args.tol,
        ..FitConfig::default()
    };
    let result = fit(&data, &cfg)?;
    let out = args.out.unwrap_or_else(|| default_fit_path(&args.data));
    if out == args.data {
        return Err(Failure::input("refusing to overwrite the input dataset"));
    }
    write_json(&out, &result.representation)?;
    if args.json {
        print_json(&result)?;
    } else {
        println!("model: {model:?}");
        println!("violations: {} of {}", result.violations, data.comparisons().len());
        println!("objective: {:e} after {} iterations (restart {})", result.objective, result.iterations, result.restart);
        if result.underdetermined {
            println!("warning: fewer comparisons than free parameters");
        }
        println!("representation written to {}", out.display());
    }
    if !result.converged {
        eprintln!("warning: no convergence after {} iterations; best-so-far returned", result.iterations);
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(0)
}

fn parse_space(text: &str) -> Result<StateSpace, Failure> {
    let dims: Vec<usize> = text
        .split(['x', 'X'])
        .map(|d| d.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::input(format!("--space expects NxM or NxMxK, got {text:?}")))?;
    match dims[..] {
        [s, t] => Ok(StateSpace::indexed(s, t, None)?),
        [s, t, i] => Ok(StateSpace::indexed(s, t, Some(i))?),
        _ => Err(Failure::input(format!("--space expects NxM or NxMxK, got {text:?}"))),
    }
}

fn parse_reals(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::input(format!("{what} expects comma-separated numbers, got {text:?}")))
}

fn gen(args: GenArgs) -> Outcome {
    let (data, truth) = if args.counterexample {
        let rows = args.pi.split(';').map(|r| parse_reals(r, "--pi")).collect::<Result<Vec<_>, _>>()?;
        let belief = JointBelief::from_rows(rows)?;
        (gen_correlated_counterexample(args.xi, args.xi_prime, &belief)?, None)
    } else {
        let mut cfg = AgentConfig::new(args.model.into(), args.seed, parse_space(&args.space)?, parse_reals(&args.grid, "--grid")?, args.size);
        if let Some(m) = args.min_minor {
            cfg.structure = Some(BeliefStructure::Correlated { min_minor: m });
        } else if args.product_belief {
            cfg.structure = Some(BeliefStructure::Product);
        }
        if let Some(k) = args.sample {
            cfg.comparisons = ComparisonPlan::Sampled(k);
        }
        let (rep, data) = gen_agent(&cfg)?;
        (data, Some(rep))
    };
    match &args.out {
        Some(path) => write_json(path, &data)?,
        None => print_json(&data)?,
    }
    if let Some(path) = &args.truth {
        match &truth {
            Some(rep) => write_json(path, rep)?,
            None => return Err(Failure::input("--truth is only available for generated agents")),
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Check(a) => check(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Factorize(a) => factorize_cmd(a),
        Command::Fit(a) => fit_cmd(a),
        Command::Gen(a) => gen(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
