//! `report` reads finished run directories and writes one Markdown summary.
//! It never computes metrics itself.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde::Deserialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::Step;
use crate::config::{Problem, RunConfig};
use crate::run::RunDir;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run directories to summarise.
    #[arg(required = true)]
    runs: Vec<PathBuf>,
}

#[derive(Deserialize)]
struct Entry {
    path: String,
    sha256: String,
}

#[derive(Deserialize)]
struct Manifest {
    command: String,
    artifacts: Vec<Entry>,
}

/// Artifacts copied into the report verbatim, as tables.
const TABLES: &[(&str, &str)] = &[
    ("stats.tsv", "Dataset statistics"),
    ("fold_counts.tsv", "Validation fold label counts"),
    ("cv_table.tsv", "Cross-validation"),
    ("confusion.tsv", "Pooled confusion matrix (rows gold, columns predicted)"),
    ("grid_table.tsv", "Grid search"),
    ("llm_confusion.tsv", "Zero-shot confusion matrix"),
    ("ambition_eval.tsv", "Ambition extraction"),
    ("timeseries.tsv", "Yearly target index"),
];

const JSONS: &[(&str, &str)] = &[("llm_metrics.json", "Zero-shot metrics"), ("apply_report.json", "Applied corrections")];

fn tsv_to_markdown(text: &str) -> String {
    let mut out = String::new();
    for (i, line) in text.lines().filter(|l| !l.is_empty()).enumerate() {
        let cells: Vec<&str> = line.split('\t').collect();
        let _ = writeln!(out, "| {} |", cells.join(" | "));
        if i == 0 {
            let _ = writeln!(out, "|{}", "---|".repeat(cells.len()));
        }
    }
    out
}

fn summarise(dir: &Path, out: &mut String) -> Result<()> {
    let manifest_path = dir.join("manifest.json");
    let text = fs::read_to_string(&manifest_path).with_context(|| format!("reading {}", manifest_path.display()))?;
    let manifest: Manifest = serde_json::from_str(&text).with_context(|| format!("parsing {}", manifest_path.display()))?;
    let name = dir.file_name().map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned());
    let _ = writeln!(out, "## {name} (`{}`)\n", manifest.command);

    let mut changed = Vec::new();
    for e in &manifest.artifacts {
        match fs::read(dir.join(&e.path)) {
            Ok(bytes) => {
                let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
                if digest != e.sha256 {
                    changed.push(format!("{} (modified)", e.path));
                }
            }
            Err(_) => changed.push(format!("{} (missing)", e.path)),
        }
    }
    if changed.is_empty() {
        let _ = writeln!(out, "{} artifacts, all matching the manifest.\n", manifest.artifacts.len());
    } else {
        let _ = writeln!(out, "Artifacts differing from the manifest: {}\n", changed.join(", "));
    }

    let listed = |n: &str| manifest.artifacts.iter().any(|e| e.path == n);
    for (file, title) in TABLES {
        if listed(file) {
            let body = fs::read_to_string(dir.join(file)).unwrap_or_default();
            let _ = writeln!(out, "### {title}\n\n{}", tsv_to_markdown(&body));
        }
    }
    for (file, title) in JSONS {
        if listed(file) {
            let body = fs::read_to_string(dir.join(file)).unwrap_or_default();
            let _ = writeln!(out, "### {title}\n\n```json\n{}\n```\n", body.trim_end());
        }
    }
    let curves: Vec<&str> =
        manifest.artifacts.iter().map(|e| e.path.as_str()).filter(|p| p.starts_with("curve_") && p.ends_with(".tsv")).collect();
    for c in curves {
        let body = fs::read_to_string(dir.join(c)).unwrap_or_default();
        let _ = writeln!(out, "### Accuracy-coverage curve `{c}`\n\n{}", tsv_to_markdown(&body));
    }
    Ok(())
}

impl Step for ReportArgs {
    fn apply(&self, _config: &mut RunConfig) {}

    fn check(&self, _config: &RunConfig) -> Vec<Problem> {
        self.runs
            .iter()
            .filter(|r| !r.join("manifest.json").is_file())
            .map(|r| Problem { field: "runs".into(), message: format!("{} is not a finished run directory", r.display()) })
            .collect()
    }

    fn execute(&self, _config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let mut out = String::from("# Run report\n\n");
        for dir in &self.runs {
            summarise(dir, &mut out)?;
        }
        run.write("report.md", out)?;
        Ok(json!({ "runs": self.runs.len() }))
    }
}
