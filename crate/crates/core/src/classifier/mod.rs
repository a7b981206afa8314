//! Fine-tuning, cross-validation and hyperparameter grids for the target
//! classifiers.

pub mod backend;
pub mod config;
pub mod metrics;
pub mod ngram;
pub mod stub;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{stratified_kfold, LabeledSample};
use crate::label::ClassLabel;
use crate::seed::derive_seed;

pub use backend::{argmax, resolve_base, Backend, ModelHandle, Prediction, TrainSet, TrainedModel};
pub use config::{Averaging, ClassifierConfig};
pub use metrics::{ConfusionMatrix, FoldMetrics, MetricSummary, Summary};

fn check_labels<L: ClassLabel>(config: &ClassifierConfig) -> Result<()> {
    config.validate()?;
    if config.num_labels != L::ALL.len() {
        return Err(Error::Config(format!("num_labels = {} but the data uses a {}-class label set", config.num_labels, L::ALL.len())));
    }
    Ok(())
}

fn split_columns<'a, L: ClassLabel>(samples: &[&'a LabeledSample<L>]) -> (Vec<&'a str>, Vec<usize>) {
    samples.iter().map(|s| (s.text.as_str(), s.label.index())).unzip()
}

fn train_on<L: ClassLabel>(
    train: &[&LabeledSample<L>],
    val: &[&LabeledSample<L>],
    config: &ClassifierConfig,
    backend: &dyn Backend,
    seed: u64,
) -> Result<ModelHandle<L>> {
    check_labels::<L>(config)?;
    let (tt, tl) = split_columns(train);
    let (vt, vl) = split_columns(val);
    let model = backend.train(TrainSet { texts: &tt, labels: &tl }, TrainSet { texts: &vt, labels: &vl }, L::ALL.len(), config, seed)?;
    ModelHandle::new(model, config.clone())
}

/// Trains one model, selecting the checkpoint with the best validation
/// accuracy under early stopping.
pub fn fine_tune<L: ClassLabel>(
    train: &[LabeledSample<L>],
    val: &[LabeledSample<L>],
    config: &ClassifierConfig,
    backend: &dyn Backend,
) -> Result<ModelHandle<L>> {
    let train: Vec<&LabeledSample<L>> = train.iter().collect();
    let val: Vec<&LabeledSample<L>> = val.iter().collect();
    train_on(&train, &val, config, backend, config.seed)
}

/// Held-out prediction for one sample during cross-validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "L: ClassLabel")]
pub struct SamplePrediction<L> {
    pub sample_id: String,
    pub fold: usize,
    pub gold: L,
    pub predicted: L,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "L: ClassLabel")]
pub struct CvReport<L> {
    pub base_model_id: String,
    pub k: usize,
    pub per_fold: Vec<FoldMetrics>,
    pub summary: MetricSummary,
    /// Pooled over all validation folds.
    pub confusion: ConfusionMatrix,
    /// Per-fold validation label counts, in label order.
    pub fold_label_counts: Vec<Vec<usize>>,
    /// Held-out predictions in dataset order; absent when a report was
    /// stripped for publication.
    pub predictions: Option<Vec<SamplePrediction<L>>>,
}

impl<L: ClassLabel> CvReport<L> {
    pub fn to_table(&self) -> String {
        let mut out = String::from("fold\taccuracy\tf1\tprecision\trecall\n");
        for (i, m) in self.per_fold.iter().enumerate() {
            let _ = writeln!(out, "{i}\t{:.4}\t{:.4}\t{:.4}\t{:.4}", m.accuracy, m.f1, m.precision, m.recall);
        }
        let s = &self.summary;
        let _ = writeln!(out, "mean\t{:.4}\t{:.4}\t{:.4}\t{:.4}", s.accuracy.mean, s.f1.mean, s.precision.mean, s.recall.mean);
        let _ = writeln!(out, "std\t{:.4}\t{:.4}\t{:.4}\t{:.4}", s.accuracy.std, s.f1.std, s.precision.std, s.recall.std);
        out
    }
}

#[cfg(feature = "parallel")]
fn run_folds<T: Send>(k: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    use rayon::prelude::*;
    (0..k).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_folds<T>(k: usize, f: impl Fn(usize) -> Result<T>) -> Result<Vec<T>> {
    (0..k).map(f).collect()
}

/// Stratified k-fold cross-validation.
///
/// The split seed and each fold's training seed derive from `config.seed`.
/// Folds train independently (in parallel with the `parallel` feature) and
/// precision, recall and F1 follow `config.averaging`.
pub fn cross_validate<L: ClassLabel>(
    samples: &[LabeledSample<L>],
    config: &ClassifierConfig,
    k: usize,
    backend: &dyn Backend,
) -> Result<CvReport<L>> {
    check_labels::<L>(config)?;
    let splits = stratified_kfold(samples, k, derive_seed(config.seed, 0))?;

    let fold_results = run_folds(k, |fold| {
        let split = &splits[fold];
        let train: Vec<&LabeledSample<L>> = split.train.iter().map(|&i| &samples[i]).collect();
        let val: Vec<&LabeledSample<L>> = split.val.iter().map(|&i| &samples[i]).collect();
        let model = train_on(&train, &val, config, backend, derive_seed(config.seed, fold as u64 + 1))?;
        let texts: Vec<&str> = val.iter().map(|s| s.text.as_str()).collect();
        let preds = model.predict(&texts)?;
        Ok(split.val.iter().copied().zip(preds).collect::<Vec<_>>())
    })?;

    let mut per_fold = Vec::with_capacity(k);
    let mut confusion = ConfusionMatrix::new::<L>();
    let mut fold_label_counts = Vec::with_capacity(k);
    let mut slots: Vec<Option<SamplePrediction<L>>> = vec![None; samples.len()];
    for (fold, preds) in fold_results.into_iter().enumerate() {
        let cm = ConfusionMatrix::from_pairs(preds.iter().map(|(i, p)| (samples[*i].label, p.label)));
        per_fold.push(cm.metrics(config.averaging));
        fold_label_counts.push(cm.row_sums().into_iter().map(|c| c as usize).collect());
        confusion.merge(&cm);
        for (i, p) in preds {
            slots[i] = Some(SamplePrediction {
                sample_id: samples[i].id.clone(),
                fold,
                gold: samples[i].label,
                predicted: p.label,
                probabilities: p.probabilities,
            });
        }
    }
    let predictions: Vec<SamplePrediction<L>> =
        slots.into_iter().collect::<Option<_>>().ok_or_else(|| Error::Input("sample missing from validation folds".into()))?;
    Ok(CvReport {
        base_model_id: config.base_model_id.clone(),
        k,
        summary: MetricSummary::of(&per_fold),
        per_fold,
        confusion,
        fold_label_counts,
        predictions: Some(predictions),
    })
}

/// Hyperparameter value lists; every combination is one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub learning_rates: Vec<f64>,
    pub epochs: Vec<usize>,
    pub batch_sizes: Vec<usize>,
}

impl Default for Grid {
    /// The twelve-cell grid explored for the published models.
    fn default() -> Self {
        Grid { learning_rates: vec![3e-5, 5e-5, 7e-5], epochs: vec![5, 10], batch_sizes: vec![16, 32] }
    }
}

impl Grid {
    pub fn cells(&self) -> Vec<(f64, usize, usize)> {
        let mut cells = Vec::new();
        for &lr in &self.learning_rates {
            for &ep in &self.epochs {
                for &bs in &self.batch_sizes {
                    cells.push((lr, ep, bs));
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub base_model_id: String,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub accuracy: Summary,
    pub f1: Summary,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub rows: Vec<GridRow>,
}

impl GridReport {
    /// Best mean accuracy first; ties keep grid order.
    pub fn sort_by_accuracy(&mut self) {
        self.rows.sort_by(|a, b| b.accuracy.mean.total_cmp(&a.accuracy.mean));
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("base_model\tlearning_rate\tepochs\tbatch_size\taccuracy_mean\taccuracy_std\tf1_mean\tf1_std\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{:e}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}",
                r.base_model_id, r.learning_rate, r.epochs, r.batch_size, r.accuracy.mean, r.accuracy.std, r.f1.mean, r.f1.std
            );
        }
        out
    }
}

/// One cross-validation per (base, cell). `resolve` maps base ids to
/// backends; other settings come from `base_config`.
pub fn grid_search<L: ClassLabel>(
    samples: &[LabeledSample<L>],
    grid: &Grid,
    bases: &[String],
    base_config: &ClassifierConfig,
    k: usize,
    resolve: &dyn Fn(&str) -> Result<Box<dyn Backend>>,
) -> Result<GridReport> {
    let cells = grid.cells();
    if cells.is_empty() || bases.is_empty() {
        return Err(Error::Config("grid search needs at least one cell and one base model".into()));
    }
    let mut rows = Vec::with_capacity(cells.len() * bases.len());
    for base in bases {
        let backend = resolve(base)?;
        for &(lr, epochs, batch_size) in &cells {
            let config = ClassifierConfig { base_model_id: base.clone(), learning_rate: lr, epochs, batch_size, ..base_config.clone() };
            let report = cross_validate(samples, &config, k, backend.as_ref())?;
            log::info!("grid {base} lr={lr:e} epochs={epochs} batch={batch_size}: acc {:.4}", report.summary.accuracy.mean);
            rows.push(GridRow {
                base_model_id: base.clone(),
                learning_rate: lr,
                epochs,
                batch_size,
                accuracy: report.summary.accuracy,
                f1: report.summary.f1,
            });
        }
    }
    Ok(GridReport { rows })
}
