//! `netzero`: builds, evaluates and applies net-zero and reduction target
//! detectors from one config file.
//!
//! Every command writes into a fresh run directory and prints a one-line
//! JSON summary on stdout. Failures print a JSON error object on stderr and
//! exit with 2 for usage or configuration errors, 1 for everything else.

mod commands;
mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde_json::json;

use crate::commands::{corpus, data, eval, model, report, review};
use crate::config::{ConfigProblems, RunConfig};
use crate::run::RunDir;

#[derive(Debug, Parser)]
#[command(name = "netzero", version, about = "Net-zero and reduction target detection toolkit")]
struct Cli {
    /// TOML run configuration. `NETZERO__SECTION__KEY` variables override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write artifacts here instead of a new timestamped directory.
    #[arg(long, global = true)]
    run_dir: Option<PathBuf>,
    /// Parent of generated run directories (`paths.outputs`).
    #[arg(long, global = true)]
    outputs: Option<PathBuf>,
    /// Master seed (`seed`); also used for training.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the cleaned dataset from a tracker export and non-target sources.
    Ingest(data::IngestArgs),
    /// Length and label statistics of a dataset.
    Stats(data::StatsArgs),
    /// Stratified k-fold assignment and per-fold label counts.
    Split(data::SplitArgs),
    /// Fine-tune one model with early stopping on a held-out fold.
    Train(model::TrainArgs),
    /// Stratified k-fold cross-validation.
    Crossval(model::CrossvalArgs),
    /// Hyperparameter grid of cross-validations.
    Grid(model::GridArgs),
    /// Zero-shot chat model baseline.
    EvalLlm(eval::EvalLlmArgs),
    /// Ambition extraction accuracy in RAW, OPTIMAL and CONFIDENCE modes.
    AmbitionEval(eval::AmbitionEvalArgs),
    /// Accuracy-coverage curve over a threshold grid.
    Curve(eval::CurveArgs),
    /// Two-stage classification and yearly target index of a corpus.
    AnalyzeCorpus(corpus::AnalyzeArgs),
    /// Review sample of classified corpus sentences.
    SampleHandcheck(corpus::HandcheckArgs),
    /// Export cross-validation errors for review.
    HitlExport(review::ExportArgs),
    /// Apply reviewed corrections to a dataset.
    HitlApply(review::ApplyArgs),
    /// Summarise existing run directories without recomputing anything.
    Report(report::ReportArgs),
    /// Generate synthetic demo data.
    Synth(data::SynthArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Stats(_) => "stats",
            Command::Split(_) => "split",
            Command::Train(_) => "train",
            Command::Crossval(_) => "crossval",
            Command::Grid(_) => "grid",
            Command::EvalLlm(_) => "eval-llm",
            Command::AmbitionEval(_) => "ambition-eval",
            Command::Curve(_) => "curve",
            Command::AnalyzeCorpus(_) => "analyze-corpus",
            Command::SampleHandcheck(_) => "sample-handcheck",
            Command::HitlExport(_) => "hitl-export",
            Command::HitlApply(_) => "hitl-apply",
            Command::Report(_) => "report",
            Command::Synth(_) => "synth",
        }
    }

    fn as_step(&self) -> &dyn commands::Step {
        match self {
            Command::Ingest(a) => a,
            Command::Stats(a) => a,
            Command::Split(a) => a,
            Command::Train(a) => a,
            Command::Crossval(a) => a,
            Command::Grid(a) => a,
            Command::EvalLlm(a) => a,
            Command::AmbitionEval(a) => a,
            Command::Curve(a) => a,
            Command::AnalyzeCorpus(a) => a,
            Command::SampleHandcheck(a) => a,
            Command::HitlExport(a) => a,
            Command::HitlApply(a) => a,
            Command::Report(a) => a,
            Command::Synth(a) => a,
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = config::load(cli.config.as_deref(), std::env::vars())?;
    if let Some(o) = &cli.outputs {
        config.paths.outputs = Some(o.clone());
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    let step = cli.command.as_step();
    step.apply(&mut config);
    config.classifier.seed = config.seed;

    let mut problems = config.check_values();
    problems.extend(step.check(&config));
    if !problems.is_empty() {
        return Err(ConfigProblems(problems).into());
    }
    Ok(config)
}

fn execute(cli: Cli) -> Result<serde_json::Value> {
    let config = resolve_config(&cli)?;
    let step = cli.command.as_step();
    let invocation = format!("{:?}", cli.command);
    let mut run = RunDir::create(&config, cli.command.name(), &invocation, cli.run_dir.as_deref())?;
    let details = step.execute(&config, &mut run)?;
    let (root, artifacts) = run.finish()?;
    Ok(json!({
        "command": cli.command.name(),
        "run_dir": root,
        "artifacts": artifacts,
        "details": details,
    }))
}

/// Exit code and `kind` for an error chain.
fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    if err.downcast_ref::<ConfigProblems>().is_some() {
        return (2, "config");
    }
    match err.downcast_ref::<netzero::Error>() {
        Some(netzero::Error::Config(_)) | Some(netzero::Error::ModelNotFound(_)) => (2, "config"),
        Some(_) => (1, "input"),
        None => (1, "runtime"),
    }
}

fn error_json(err: &anyhow::Error) -> (u8, serde_json::Value) {
    let (code, kind) = classify(err);
    let mut body = json!({
        "kind": kind,
        "message": format!("{err:#}"),
    });
    if let Some(p) = err.downcast_ref::<ConfigProblems>() {
        body["problems"] = serde_json::to_value(&p.0).expect("problems serialize");
    }
    (code, json!({ "error": body }))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand)
            {
                let _ = e.print();
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { ExitCode::from(2) } else { ExitCode::SUCCESS };
            }
            let body = json!({ "error": { "kind": "usage", "message": e.render().to_string().trim_end() } });
            eprintln!("{body}");
            return ExitCode::from(2);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).format_timestamp(None).init();

    match execute(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            let (code, body) = error_json(&err);
            eprintln!("{body}");
            ExitCode::from(code)
        }
    }
}
