use std::io::BufRead;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use netzero::classifier::ModelHandle;
use netzero::corpus::read_corpus;
use netzero::corpus::{analyze_corpus, records_tsv, sample_for_handcheck, shares_tsv, SentenceRecord};
use netzero::corpus::{emit_timeseries, Aggregation};
use netzero::hitl::save_review;
use netzero::{ClimateLabel, TargetLabel};
use serde_json::json;

use super::{set, set_path, Step};
use crate::config::{check_paths, Need, Problem, RunConfig};
use crate::run::RunDir;

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Directory of transcript documents (`paths.corpus`).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Trained climate detector, as written by `train --task climate`.
    #[arg(long)]
    climate_model: Option<PathBuf>,
    /// Trained target classifier, as written by `train --task target`.
    #[arg(long)]
    target_model: Option<PathBuf>,
    #[arg(long, value_parser = parse_aggregation)]
    aggregation: Option<Aggregation>,
    /// Skip the SVG chart.
    #[arg(long)]
    no_plot: bool,
}

fn parse_aggregation(s: &str) -> Result<Aggregation, String> {
    match s.replace('-', "_").as_str() {
        "event_mean" => Ok(Aggregation::EventMean),
        "quarter_first" => Ok(Aggregation::QuarterFirst),
        other => Err(format!("expected event_mean or quarter_first, got {other:?}")),
    }
}

impl Step for AnalyzeArgs {
    fn apply(&self, config: &mut RunConfig) {
        set_path(&mut config.paths.corpus, &self.corpus);
        set_path(&mut config.paths.climate_model, &self.climate_model);
        set_path(&mut config.paths.target_model, &self.target_model);
        set(&mut config.corpus.aggregation, &self.aggregation);
        if self.no_plot {
            config.corpus.plot = false;
        }
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        check_paths(&config.paths, &[("corpus", Need::Dir), ("climate_model", Need::Dir), ("target_model", Need::Dir)])
    }

    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let paths = &config.paths;
        let docs = read_corpus(paths.corpus.as_deref().expect("checked"))?;
        let climate =
            ModelHandle::<ClimateLabel>::load(paths.climate_model.as_deref().expect("checked")).context("loading climate model")?;
        let target = ModelHandle::<TargetLabel>::load(paths.target_model.as_deref().expect("checked")).context("loading target model")?;
        let analysis = analyze_corpus(&docs, &climate, &target, config.corpus.aggregation)?;
        let records: String = analysis.records.iter().map(|r| serde_json::to_string(r).expect("serializes") + "\n").collect();
        run.write("records.jsonl", records)?;
        run.write("records.tsv", records_tsv(&analysis.records))?;
        run.write("shares.tsv", shares_tsv(&analysis.shares))?;
        for p in emit_timeseries(&analysis.index, &run.path("timeseries.tsv"), config.corpus.plot)? {
            run.record(&p);
        }
        let climate_n = analysis.records.iter().filter(|r| r.is_climate).count();
        let target_n = analysis.records.iter().filter(|r| r.target != TargetLabel::None).count();
        Ok(json!({
            "documents": docs.len(),
            "sentences": analysis.records.len(),
            "climate_sentences": climate_n,
            "target_sentences": target_n,
            "years": analysis.index.len(),
        }))
    }
}

#[derive(Debug, Args)]
pub struct HandcheckArgs {
    /// `records.jsonl` from an `analyze-corpus` run (`paths.records`).
    #[arg(long)]
    records: Option<PathBuf>,
    /// Random non-target sentences to add (`corpus.handcheck_random`).
    #[arg(long)]
    n_random: Option<usize>,
    /// Leave out the sentences labeled as targets.
    #[arg(long)]
    no_targets: bool,
}

fn read_records(path: &std::path::Path) -> Result<Vec<SentenceRecord>> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("{} line {}", path.display(), i + 1))?);
    }
    Ok(out)
}

impl Step for HandcheckArgs {
    fn apply(&self, config: &mut RunConfig) {
        set_path(&mut config.paths.records, &self.records);
        set(&mut config.corpus.handcheck_random, &self.n_random);
        if self.no_targets {
            config.corpus.include_targets = false;
        }
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        check_paths(&config.paths, &[("records", Need::File)])
    }

    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let records = read_records(config.paths.records.as_deref().expect("checked"))?;
        let c = &config.corpus;
        let items = sample_for_handcheck(&records, c.include_targets, c.handcheck_random, config.seed);
        let path = run.path("handcheck.csv");
        save_review(&path, &items)?;
        run.record(&path);
        let targets = items.iter().filter(|i| i.predicted_label != TargetLabel::None).count();
        Ok(json!({ "items": items.len(), "targets": targets }))
    }
}
