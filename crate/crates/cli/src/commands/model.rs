use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use netzero::classifier::{cross_validate, fine_tune, grid_search, Averaging, CvReport};
use netzero::ingest::{stratified_kfold, stratified_subsample, LabeledSample};
use netzero::seed::derive_seed;
use netzero::ClassLabel;
use serde_json::json;

use super::{backend_for, label_header, set, set_path, Step, Task};
use crate::config::{check_optional, check_paths, Need, Problem, RunConfig};
use crate::run::RunDir;
use crate::with_task_dataset;

/// Flags mirroring the `[classifier]` section.
#[derive(Debug, Args)]
pub struct ClassifierArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Task::Target)]
    task: Task,
    /// Base model id (`classifier.base_model_id`).
    #[arg(long)]
    base_model: Option<String>,
    /// Directory of base model descriptors (`paths.models`).
    #[arg(long)]
    models: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    grad_accumulation: Option<usize>,
    #[arg(long)]
    warmup_ratio: Option<f64>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long, value_parser = parse_averaging)]
    averaging: Option<Averaging>,
    #[arg(long)]
    k: Option<usize>,
}

fn parse_averaging(s: &str) -> Result<Averaging, String> {
    match s {
        "macro" => Ok(Averaging::Macro),
        "weighted" => Ok(Averaging::Weighted),
        other => Err(format!("expected macro or weighted, got {other:?}")),
    }
}

impl ClassifierArgs {
    fn apply(&self, config: &mut RunConfig) {
        set_path(&mut config.paths.dataset, &self.dataset);
        set_path(&mut config.paths.models, &self.models);
        let c = &mut config.classifier;
        set(&mut c.base_model_id, &self.base_model);
        set(&mut c.epochs, &self.epochs);
        set(&mut c.batch_size, &self.batch_size);
        set(&mut c.learning_rate, &self.learning_rate);
        set(&mut c.grad_accumulation, &self.grad_accumulation);
        set(&mut c.warmup_ratio, &self.warmup_ratio);
        set(&mut c.patience, &self.patience);
        set(&mut c.averaging, &self.averaging);
        // the label set of the task decides the head size
        c.num_labels = self.task.num_labels();
        set(&mut config.k, &self.k);
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        let mut p = check_paths(&config.paths, &[("dataset", Need::File)]);
        p.extend(check_optional(&config.paths, &[("models", Need::Dir)]));
        p
    }
}

fn history_tsv(history: &[f64]) -> String {
    let mut out = String::from("epoch\tval_accuracy\n");
    for (i, a) in history.iter().enumerate() {
        let _ = writeln!(out, "{}\t{a:.6}", i + 1);
    }
    out
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    common: ClassifierArgs,
    /// Fold held out for early stopping.
    #[arg(long, default_value_t = 0)]
    val_fold: usize,
}

fn train_task<L: ClassLabel>(
    samples: &[LabeledSample<L>],
    args: &TrainArgs,
    config: &RunConfig,
    run: &mut RunDir,
) -> Result<serde_json::Value> {
    let splits = stratified_kfold(samples, config.k, derive_seed(config.seed, 0))?;
    let split = splits
        .get(args.val_fold)
        .ok_or_else(|| netzero::Error::Config(format!("val fold {} is not below k = {}", args.val_fold, config.k)))?;
    let train: Vec<LabeledSample<L>> = split.train.iter().map(|&i| samples[i].clone()).collect();
    let val: Vec<LabeledSample<L>> = split.val.iter().map(|&i| samples[i].clone()).collect();
    let backend = backend_for(&config.classifier.base_model_id, config)?;
    let model = fine_tune(&train, &val, &config.classifier, backend.as_ref())?;
    let dir = run.path("model");
    model.save(&dir)?;
    run.record(&dir);
    run.write("history.tsv", history_tsv(model.history()))?;
    let best = model.history().iter().copied().fold(f64::NAN, f64::max);
    Ok(json!({ "train": train.len(), "val": val.len(), "best_val_accuracy": best }))
}

impl Step for TrainArgs {
    fn apply(&self, config: &mut RunConfig) {
        self.common.apply(config);
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        let mut p = self.common.check(config);
        if self.val_fold >= config.k {
            p.push(Problem { field: "--val-fold".into(), message: format!("must be below k = {}", config.k) });
        }
        p
    }

    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let path = config.paths.dataset.as_deref().expect("checked");
        with_task_dataset!(self.common.task, path, |samples| train_task(&samples, self, config, run))
    }
}

#[derive(Debug, Args)]
pub struct CrossvalArgs {
    #[command(flatten)]
    common: ClassifierArgs,
}

pub fn write_cv<L: ClassLabel>(report: &CvReport<L>, run: &mut RunDir) -> Result<()> {
    run.write_json("cv_report.json", report)?;
    run.write("cv_table.tsv", report.to_table())?;
    run.write("confusion.tsv", report.confusion.to_table())?;
    let mut counts = format!("fold\t{}\n", label_header::<L>());
    for (f, row) in report.fold_label_counts.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        let _ = writeln!(counts, "{f}\t{}", cells.join("\t"));
    }
    run.write("fold_counts.tsv", counts)?;
    Ok(())
}

fn crossval_task<L: ClassLabel>(samples: &[LabeledSample<L>], config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
    let backend = backend_for(&config.classifier.base_model_id, config)?;
    let report = cross_validate(samples, &config.classifier, config.k, backend.as_ref())?;
    write_cv(&report, run)?;
    let s = &report.summary;
    Ok(json!({
        "accuracy": s.accuracy.mean,
        "accuracy_std": s.accuracy.std,
        "f1": s.f1.mean,
        "precision": s.precision.mean,
        "recall": s.recall.mean,
    }))
}

impl Step for CrossvalArgs {
    fn apply(&self, config: &mut RunConfig) {
        self.common.apply(config);
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        self.common.check(config)
    }

    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let path = config.paths.dataset.as_deref().expect("checked");
        with_task_dataset!(self.common.task, path, |samples| crossval_task(&samples, config, run))
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    common: ClassifierArgs,
    /// Stratified fraction of the data to use (`grid.subsample`).
    #[arg(long)]
    subsample: Option<f64>,
    /// Base models to sweep, comma separated (`grid.bases`).
    #[arg(long, value_delimiter = ',')]
    bases: Vec<String>,
}

fn grid_task<L: ClassLabel>(samples: Vec<LabeledSample<L>>, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
    let samples = if config.grid.subsample < 1.0 {
        let labels: Vec<L> = samples.iter().map(|s| s.label).collect();
        let keep = stratified_subsample(&labels, config.grid.subsample, derive_seed(config.seed, 100));
        let picked: Vec<LabeledSample<L>> = keep.into_iter().map(|i| samples[i].clone()).collect();
        let ids: String = picked.iter().map(|s| format!("{}\n", s.id)).collect();
        run.write("subsample_ids.txt", ids)?;
        picked
    } else {
        samples
    };
    let bases = if config.grid.bases.is_empty() { vec![config.classifier.base_model_id.clone()] } else { config.grid.bases.clone() };
    let resolve = |id: &str| backend_for(id, config);
    let report = grid_search(&samples, &config.grid.grid(), &bases, &config.classifier, config.k, &resolve)?;
    run.write_json("grid_report.json", &report)?;
    run.write("grid_table.tsv", report.to_table())?;
    let best = report.rows.iter().map(|r| r.accuracy.mean).fold(f64::NAN, f64::max);
    Ok(json!({ "cells": report.rows.len(), "samples": samples.len(), "best_accuracy": best }))
}

impl Step for GridArgs {
    fn apply(&self, config: &mut RunConfig) {
        self.common.apply(config);
        set(&mut config.grid.subsample, &self.subsample);
        if !self.bases.is_empty() {
            config.grid.bases = self.bases.clone();
        }
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        self.common.check(config)
    }

    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let path = config.paths.dataset.as_deref().expect("checked");
        with_task_dataset!(self.common.task, path, |samples| grid_task(samples, config, run))
    }
}
