use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use netzero::ingest::{
    self, clean_and_filter, dataset_stats, raw_samples, stratified_kfold, to_jsonl, DatasetStats, LabeledSample, SubLabelMap,
};
use netzero::seed::derive_seed;
use netzero::{synth, ClassLabel};
use serde_json::json;

use super::{label_header, set, set_path, Step, Task};
use crate::config::{check_optional, check_paths, Need, Problem, RunConfig};
use crate::run::RunDir;
use crate::with_task_dataset;

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Tracker claim export (`paths.claims`).
    #[arg(long)]
    claims: Option<PathBuf>,
    /// Non-target source files; repeatable (`paths.non_target`).
    #[arg(long = "non-target")]
    non_target: Vec<PathBuf>,
    /// Sub-label mapping TOML (`paths.mapping`); the shipped map otherwise.
    #[arg(long)]
    mapping: Option<PathBuf>,
    #[arg(long)]
    min_words: Option<usize>,
}

fn stats_table<L: ClassLabel>(rows: &[(&str, &DatasetStats<L>)]) -> String {
    let mut out = format!("set\tcount\tmean_len\tstd_len\tmin_len\tp25\tp75\tmax_len\t{}\n", label_header::<L>());
    for (name, s) in rows {
        let counts: Vec<String> = L::ALL.iter().map(|l| s.per_label_counts.get(l).copied().unwrap_or(0).to_string()).collect();
        let _ = writeln!(
            out,
            "{name}\t{}\t{:.2}\t{:.2}\t{}\t{:.2}\t{:.2}\t{}\t{}",
            s.count,
            s.mean_len,
            s.std_len,
            s.min_len,
            s.p25,
            s.p75,
            s.max_len,
            counts.join("\t")
        );
    }
    out
}

impl Step for IngestArgs {
    fn apply(&self, config: &mut RunConfig) {
        set_path(&mut config.paths.claims, &self.claims);
        set_path(&mut config.paths.mapping, &self.mapping);
        if !self.non_target.is_empty() {
            config.paths.non_target = self.non_target.clone();
        }
        set(&mut config.ingest.min_words, &self.min_words);
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        let mut p = check_paths(&config.paths, &[("claims", Need::File), ("non_target", Need::File)]);
        p.extend(check_optional(&config.paths, &[("mapping", Need::File)]));
        p
    }

    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let paths = &config.paths;
        let map = match &paths.mapping {
            Some(p) => SubLabelMap::load(p)?,
            None => SubLabelMap::default(),
        };
        let claims = ingest::tracker::read_claims(paths.claims.as_deref().expect("checked"), &config.ingest.columns)?;
        let mut non_target = Vec::new();
        for p in &paths.non_target {
            non_target.extend(ingest::tracker::read_non_target(p, config.ingest.non_target_delimiter)?);
        }
        let raw = raw_samples(&claims, &non_target, &map)?;
        let (samples, report) = clean_and_filter(raw, config.ingest.min_words)?;
        run.write("dataset.jsonl", to_jsonl(&samples))?;
        run.write_json("ingest_report.json", &report)?;
        run.write("stats.tsv", stats_table(&[("raw", &report.before), ("clean", &report.after)]))?;
        Ok(json!({
            "samples": samples.len(),
            "removed": report.removed,
            "kappa": report.agreement.as_ref().map(|a| a.cohens_kappa),
        }))
    }
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Task::Target)]
    task: Task,
}

impl Step for StatsArgs {
    fn apply(&self, config: &mut RunConfig) {
        set_path(&mut config.paths.dataset, &self.dataset);
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        check_paths(&config.paths, &[("dataset", Need::File)])
    }

    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let path = config.paths.dataset.as_deref().expect("checked");
        with_task_dataset!(self.task, path, |samples| {
            let stats = dataset_stats(&samples)?;
            run.write_json("stats.json", &stats)?;
            run.write("stats.tsv", stats_table(&[("dataset", &stats)]))?;
            Ok(json!({ "count": stats.count }))
        })
    }
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value_t = Task::Target)]
    task: Task,
}

/// Fold assignment as written by `split`: the same folds `crossval` uses for
/// the same seed.
fn write_split<L: ClassLabel>(samples: &[LabeledSample<L>], k: usize, seed: u64, run: &mut RunDir) -> Result<serde_json::Value> {
    let splits = stratified_kfold(samples, k, derive_seed(seed, 0))?;
    let mut table = format!("fold\t{}\ttotal\n", label_header::<L>());
    let mut folds = Vec::with_capacity(k);
    for (f, split) in splits.iter().enumerate() {
        let mut counts = vec![0usize; L::ALL.len()];
        for &i in &split.val {
            counts[samples[i].label.index()] += 1;
        }
        let cells: Vec<String> = counts.iter().map(ToString::to_string).collect();
        let _ = writeln!(table, "{f}\t{}\t{}", cells.join("\t"), split.val.len());
        let ids: Vec<&str> = split.val.iter().map(|&i| samples[i].id.as_str()).collect();
        folds.push(json!({ "fold": f, "val_ids": ids }));
    }
    run.write_json("folds.json", &folds)?;
    run.write("fold_counts.tsv", table)?;
    Ok(json!({ "k": k, "samples": samples.len() }))
}

impl Step for SplitArgs {
    fn apply(&self, config: &mut RunConfig) {
        set_path(&mut config.paths.dataset, &self.dataset);
        set(&mut config.k, &self.k);
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        check_paths(&config.paths, &[("dataset", Need::File)])
    }

    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let path = config.paths.dataset.as_deref().expect("checked");
        with_task_dataset!(self.task, path, |samples| write_split(&samples, config.k, config.seed, run))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    /// Three-class labeled sentences (dataset.jsonl).
    Target,
    /// Climate versus generic sentences (climate.jsonl).
    Climate,
    /// Transcript corpus with a rising net-zero trend (corpus/).
    Corpus,
    /// Ambition claims with gold values (claims.tsv, gold.tsv).
    Ambition,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    /// Samples per label for target/climate data, or claims for ambition.
    #[arg(long, value_delimiter = ',')]
    counts: Vec<usize>,
    /// Documents for a corpus.
    #[arg(long, default_value_t = 30)]
    docs: usize,
}

impl Step for SynthArgs {
    fn apply(&self, _config: &mut RunConfig) {}

    fn check(&self, _config: &RunConfig) -> Vec<Problem> {
        let expected = match self.kind {
            SynthKind::Target => 3,
            SynthKind::Climate => 2,
            SynthKind::Ambition => 1,
            SynthKind::Corpus => 0,
        };
        if !self.counts.is_empty() && self.counts.len() != expected {
            return vec![Problem { field: "--counts".into(), message: format!("expected {expected} values for this kind") }];
        }
        if self.kind == SynthKind::Corpus && self.docs == 0 {
            return vec![Problem { field: "--docs".into(), message: "must be at least 1".into() }];
        }
        Vec::new()
    }

    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let seed = config.seed;
        match self.kind {
            SynthKind::Target => {
                let c = if self.counts.is_empty() { [200, 200, 300] } else { [self.counts[0], self.counts[1], self.counts[2]] };
                let samples = synth::target_dataset(c, seed);
                run.write("dataset.jsonl", to_jsonl(&samples))?;
                Ok(json!({ "samples": samples.len() }))
            }
            SynthKind::Climate => {
                let c = if self.counts.is_empty() { [300, 300] } else { [self.counts[0], self.counts[1]] };
                let samples = synth::climate_dataset(c, seed);
                run.write("climate.jsonl", to_jsonl(&samples))?;
                Ok(json!({ "samples": samples.len() }))
            }
            SynthKind::Corpus => {
                let spec = synth::CorpusSpec { n_docs: self.docs, ..Default::default() };
                let docs = synth::synthetic_corpus(&spec, seed);
                let dir = run.path("corpus");
                netzero::corpus::write_corpus(&dir, &docs)?;
                run.record(&dir);
                Ok(json!({ "documents": docs.len() }))
            }
            SynthKind::Ambition => {
                let n = self.counts.first().copied().unwrap_or(100);
                let mut rng = netzero::seed::rng(seed);
                let (mut claims, mut gold) = (String::from("sample_id\ttext\n"), String::from("sample_id\tdimension\tgold_value\n"));
                for i in 0..n {
                    let c = synth::ambition_claim(&mut rng);
                    let id = format!("syn-{i:05}");
                    let _ = writeln!(claims, "{id}\t{}", c.text.replace(['\t', '\n'], " "));
                    for (dim, v) in c.values {
                        let _ = writeln!(gold, "{id}\t{}\t{v}", dim.name());
                    }
                }
                run.write("claims.tsv", claims)?;
                run.write("gold.tsv", gold).context("writing gold")?;
                Ok(json!({ "claims": n }))
            }
        }
    }
}
