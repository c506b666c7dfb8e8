use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chainrec::gallery;
use chainrec::symmetry::{budget_from_env, is_h_decomposable};
use chainrec::{chain_relation, AnalysisReport, SystemModel};
use chainrec_cli::input::{load, parse_params};
use chainrec_cli::verify::{self, CaseReport, Settings, DEFAULT_SEED};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "chainrec",
    version,
    about = "Chain recurrence and decomposability of relations on finite metric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List or emit gallery models.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
    /// Chain analysis of a model file or `gallery:<name>[:k=v,...]`.
    Analyze {
        input: String,
        /// Scale; defaults to the model's own.
        #[arg(long)]
        eps: Option<f64>,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the condensation in DOT format here.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Verdicts over a strictly increasing list of scales.
    Sweep {
        input: String,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Evaluate a single predicate.
    Check {
        input: String,
        predicate: Predicate,
        #[arg(long)]
        eps: Option<f64>,
        /// Source point for `chain-reaches`.
        #[arg(long)]
        x: Option<usize>,
        /// Target point for `chain-reaches`.
        #[arg(long)]
        y: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run verification cases (all when no id is given).
    Verify {
        ids: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
        /// Print the case ids and exit.
        #[arg(long)]
        list: bool,
    },
    /// Write the condensation of the chain step relation in DOT format.
    ExportDot {
        input: String,
        #[arg(long)]
        eps: Option<f64>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GalleryAction {
    /// Print the catalog with default parameters.
    List {
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Write a model as JSON (stdout when --json is absent).
    Emit {
        name: String,
        /// Parameter override, `key=value`; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Predicate {
    ChainTransitive,
    ChainRecurrent,
    Decomposable,
    HDecomposable,
    ChainReaches,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn scale(model: &SystemModel, eps: Option<f64>) -> f64 {
    eps.unwrap_or(model.eps)
}

#[derive(Serialize)]
struct AnalyzeOutput<'a> {
    model: &'a str,
    n: usize,
    #[serde(flatten)]
    report: &'a AnalysisReport,
}

fn analyze(input: &str, eps: Option<f64>, json: Option<&Path>, dot: Option<&Path>) -> Result<()> {
    let model = load(input)?;
    let eps = scale(&model, eps);
    let ctx = chain_relation(&model, eps)?;
    let report = ctx.report()?;
    println!("model {} with {} points at eps {}", model.name, model.n(), eps);
    println!("chain transitive: {}", report.chain_transitive);
    println!("chain recurrent: {}", report.chain_recurrent);
    println!("chain components: {}", report.components.len());
    match &report.decomposition {
        Some((a, b)) => println!("decomposition: {} + {} points", a.len(), b.len()),
        None => println!("decomposition: none"),
    }
    if let Some(path) = json {
        write_file(path, &to_json(&AnalyzeOutput { model: &model.name, n: model.n(), report: &report })?)?;
    }
    if let Some(path) = dot {
        write_file(path, &ctx.condensation_dot())?;
    }
    Ok(())
}

fn sweep(input: &str, eps: &[f64], json: Option<&Path>) -> Result<()> {
    let model = load(input)?;
    let rows = chainrec::chain::sweep(&model, eps)?;
    println!("{:>12}  {:>10}  {:>9}  {:>10}  {:>12}", "eps", "transitive", "recurrent", "components", "decomposable");
    for r in &rows {
        println!(
            "{:>12}  {:>10}  {:>9}  {:>10}  {:>12}",
            r.eps, r.chain_transitive, r.chain_recurrent, r.components, r.decomposable
        );
    }
    if let Some(path) = json {
        write_file(path, &to_json(&rows)?)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckOutput {
    predicate: Predicate,
    eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<usize>,
    value: bool,
}

fn check(
    input: &str,
    predicate: Predicate,
    eps: Option<f64>,
    x: Option<usize>,
    y: Option<usize>,
    budget: Option<u64>,
    json: Option<&Path>,
) -> Result<()> {
    let model = load(input)?;
    let eps = scale(&model, eps);
    let value = match predicate {
        Predicate::HDecomposable => is_h_decomposable(&model, eps, budget.unwrap_or_else(budget_from_env))?.is_some(),
        _ => {
            let ctx = chain_relation(&model, eps)?;
            match predicate {
                Predicate::ChainTransitive => ctx.is_chain_transitive(),
                Predicate::ChainRecurrent => ctx.is_chain_recurrent(),
                Predicate::Decomposable => ctx.decomposition_search()?.is_some(),
                Predicate::ChainReaches => {
                    let (Some(a), Some(b)) = (x, y) else { bail!("chain-reaches needs --x and --y") };
                    if a >= model.n() || b >= model.n() {
                        bail!("points must lie below {}", model.n());
                    }
                    ctx.chain().contains(a, b)
                }
                Predicate::HDecomposable => unreachable!(),
            }
        }
    };
    println!("{value}");
    if let Some(path) = json {
        let (x, y) = if matches!(predicate, Predicate::ChainReaches) { (x, y) } else { (None, None) };
        write_file(path, &to_json(&CheckOutput { predicate, eps, x, y, value })?)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    seed: u64,
    passed: usize,
    total: usize,
    cases: Vec<&'a CaseReport>,
}

fn run_verify(ids: &[String], seed: u64, json: Option<&Path>, budget: Option<u64>, list: bool) -> Result<bool> {
    let cases = verify::select(ids)?;
    if list {
        for c in &cases {
            println!("{:<26} criterion {:>2}  {}", c.id, c.criterion, c.summary);
        }
        return Ok(true);
    }
    let settings = Settings { seed, budget: budget.unwrap_or_else(budget_from_env) };
    let results = verify::run_cases(&cases, &settings);
    let mut out = String::new();
    for ((report, elapsed), case) in results.iter().zip(&cases) {
        let passed = report.checks.iter().filter(|c| c.passed).count();
        let status = if report.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status} {:<26} {passed}/{} checks", report.id, report.checks.len());
        for c in report.checks.iter().filter(|c| !c.passed) {
            let _ = writeln!(out, "     - {}: {}", c.name, c.detail);
        }
        if let Some(e) = &report.error {
            let _ = writeln!(out, "     error: {e}");
        }
        eprintln!("{} took {:.2}s (limit {}s)", report.id, elapsed.as_secs_f64(), case.time_limit.as_secs());
    }
    let reports: Vec<&CaseReport> = results.iter().map(|(r, _)| r).collect();
    let passed = reports.iter().filter(|r| r.passed).count();
    let _ = writeln!(out, "{passed}/{} cases passed (seed {seed})", reports.len());
    print!("{out}");
    if let Some(path) = json {
        write_file(path, &to_json(&VerifySummary { seed, passed, total: reports.len(), cases: reports.clone() })?)?;
    }
    Ok(passed == reports.len())
}

fn gallery(action: GalleryAction) -> Result<()> {
    match action {
        GalleryAction::List { json } => {
            let cat = gallery::catalog();
            for spec in &cat {
                let params: Vec<String> = spec.params.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
                println!("{:<24} {:<34} {}", spec.name, params.join(" "), spec.summary);
            }
            if let Some(path) = json {
                write_file(&path, &to_json(&cat)?)?;
            }
        }
        GalleryAction::Emit { name, params, json } => {
            let model = gallery::build(&name, &parse_params(&params)?)?;
            let text = serde_json::to_string(&model)? + "\n";
            match json {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gallery { action } => gallery(action)?,
        Command::Analyze { input, eps, json, dot } => analyze(&input, eps, json.as_deref(), dot.as_deref())?,
        Command::Sweep { input, eps, json } => sweep(&input, &eps, json.as_deref())?,
        Command::Check { input, predicate, eps, x, y, budget, json } => {
            check(&input, predicate, eps, x, y, budget, json.as_deref())?
        }
        Command::Verify { ids, seed, json, budget, list } => {
            return run_verify(&ids, seed, json.as_deref(), budget, list)
        }
        Command::ExportDot { input, eps, out } => {
            let model = load(&input)?;
            let dot = chain_relation(&model, scale(&model, eps))?.condensation_dot();
            match out {
                Some(path) => write_file(&path, &dot)?,
                None => print!("{dot}"),
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
