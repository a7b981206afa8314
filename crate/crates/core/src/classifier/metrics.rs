use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classifier::config::Averaging;
use crate::label::ClassLabel;

/// Counts with rows indexed by gold label and columns by predicted label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new<L: ClassLabel>() -> Self {
        let k = L::ALL.len();
        ConfusionMatrix { labels: L::ALL.iter().map(|l| l.to_string()).collect(), counts: vec![vec![0; k]; k] }
    }

    pub fn from_pairs<L: ClassLabel>(pairs: impl IntoIterator<Item = (L, L)>) -> Self {
        let mut cm = Self::new::<L>();
        for (gold, pred) in pairs {
            cm.add(gold.index(), pred.index());
        }
        cm
    }

    pub fn add(&mut self, gold: usize, predicted: usize) {
        self.counts[gold][predicted] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, orow) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(orow) {
                *c += o;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.counts.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &c)| i == j || c == 0))
    }

    pub fn metrics(&self, averaging: Averaging) -> FoldMetrics {
        self.metrics_with_rejections(&vec![0; self.counts.len()], averaging)
    }

    /// Metrics when some items received no usable prediction at all.
    ///
    /// `rejected[g]` items of gold class `g` count as errors: they lower
    /// accuracy and that class's recall but are nobody's prediction, so no
    /// class's precision changes.
    pub fn metrics_with_rejections(&self, rejected: &[u64], averaging: Averaging) -> FoldMetrics {
        let k = self.counts.len();
        let total = (self.total() + rejected.iter().sum::<u64>()) as f64;
        if total == 0.0 {
            return FoldMetrics::default();
        }
        let diag: u64 = (0..k).map(|i| self.counts[i][i]).sum();
        let support: Vec<u64> = self.row_sums().iter().zip(rejected).map(|(r, x)| r + x).collect();
        let predicted: Vec<u64> = (0..k).map(|c| (0..k).map(|r| self.counts[r][c]).sum()).collect();
        let mut precision = Vec::with_capacity(k);
        let mut recall = Vec::with_capacity(k);
        let mut f1 = Vec::with_capacity(k);
        for c in 0..k {
            let tp = self.counts[c][c] as f64;
            let p = if predicted[c] == 0 { 0.0 } else { tp / predicted[c] as f64 };
            let r = if support[c] == 0 { 0.0 } else { tp / support[c] as f64 };
            let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
            precision.push(p);
            recall.push(r);
            f1.push(f);
        }
        let weights: Vec<f64> = match averaging {
            // classes absent from both gold and predictions do not count
            Averaging::Macro => (0..k).map(|c| if support[c] + predicted[c] == 0 { 0.0 } else { 1.0 }).collect(),
            Averaging::Weighted => support.iter().map(|&s| s as f64).collect(),
        };
        let wsum: f64 = weights.iter().sum();
        let avg = |v: &[f64]| v.iter().zip(&weights).map(|(x, w)| x * w).sum::<f64>() / wsum;
        FoldMetrics { accuracy: diag as f64 / total, f1: avg(&f1), precision: avg(&precision), recall: avg(&recall) }
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("gold\\pred");
        for l in &self.labels {
            let _ = write!(out, "\t{l}");
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.counts) {
            out.push_str(l);
            for c in row {
                let _ = write!(out, "\t{c}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub accuracy: f64,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Mean and sample standard deviation of one metric across folds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Summary::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 { (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
        Summary { mean, std }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub accuracy: Summary,
    pub f1: Summary,
    pub precision: Summary,
    pub recall: Summary,
}

impl MetricSummary {
    pub fn of(folds: &[FoldMetrics]) -> Self {
        let col = |f: fn(&FoldMetrics) -> f64| Summary::of(&folds.iter().map(f).collect::<Vec<_>>());
        MetricSummary { accuracy: col(|m| m.accuracy), f1: col(|m| m.f1), precision: col(|m| m.precision), recall: col(|m| m.recall) }
    }
}
