use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use netzero::classifier::CvReport;
use netzero::hitl::{
    active_samples, apply_corrections, collect_misclassifications, load_exclusions, load_review, save_exclusions, save_review,
};
use netzero::ingest::{read_dataset, to_jsonl};
use netzero::TargetLabel;
use serde_json::json;

use super::{set, set_path, Step};
use crate::config::{check_optional, check_paths, Need, Problem, RunConfig};
use crate::run::RunDir;

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// `cv_report.json` of a three-class `crossval` run (`paths.cv_report`).
    #[arg(long)]
    cv_report: Option<PathBuf>,
    /// Review round the exported items belong to (`hitl.round`).
    #[arg(long)]
    round: Option<u32>,
}

impl Step for ExportArgs {
    fn apply(&self, config: &mut RunConfig) {
        set_path(&mut config.paths.dataset, &self.dataset);
        set_path(&mut config.paths.cv_report, &self.cv_report);
        set(&mut config.hitl.round, &self.round);
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        check_paths(&config.paths, &[("dataset", Need::File), ("cv_report", Need::File)])
    }

    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let samples = read_dataset::<TargetLabel>(config.paths.dataset.as_deref().expect("checked"))?;
        let path = config.paths.cv_report.as_deref().expect("checked");
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let report: CvReport<TargetLabel> = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let round = config.hitl.round;
        let items = collect_misclassifications(&report, &samples, round)?;
        let out = run.path(&format!("review_round{round}.csv"));
        save_review(&out, &items)?;
        run.record(&out);
        Ok(json!({ "round": round, "items": items.len() }))
    }
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Filled-in review file (`paths.review`).
    #[arg(long)]
    review: Option<PathBuf>,
    /// Exclusions from earlier rounds (`paths.exclusions`).
    #[arg(long)]
    exclusions: Option<PathBuf>,
}

impl Step for ApplyArgs {
    fn apply(&self, config: &mut RunConfig) {
        set_path(&mut config.paths.dataset, &self.dataset);
        set_path(&mut config.paths.review, &self.review);
        set_path(&mut config.paths.exclusions, &self.exclusions);
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        let mut p = check_paths(&config.paths, &[("dataset", Need::File), ("review", Need::File)]);
        p.extend(check_optional(&config.paths, &[("exclusions", Need::File)]));
        p
    }

    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let paths = &config.paths;
        let samples = read_dataset::<TargetLabel>(paths.dataset.as_deref().expect("checked"))?;
        let exclusions = match &paths.exclusions {
            Some(p) => load_exclusions(p)?,
            None => Vec::new(),
        };
        let review = load_review(paths.review.as_deref().expect("checked"))?;
        let applied = apply_corrections(samples, exclusions, &review)?;
        run.write("dataset.jsonl", to_jsonl(&applied.samples))?;
        let ex = run.path("exclusions.csv");
        save_exclusions(&ex, &applied.exclusions)?;
        run.record(&ex);
        let active = active_samples(&applied.samples, &applied.exclusions);
        run.write("active.jsonl", to_jsonl(&active))?;
        let summary = json!({
            "relabeled": applied.relabeled,
            "removed": applied.removed,
            "active": active.len(),
            "warnings": applied.warnings,
        });
        run.write_json("apply_report.json", &summary)?;
        Ok(summary)
    }
}
