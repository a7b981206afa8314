use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::dataset::{label_counts, LabeledSample};
use crate::label::ClassLabel;

/// Word-length summary of a dataset, in whitespace tokens.
///
/// `std_len` is the sample standard deviation (0 for a single sample);
/// percentiles interpolate linearly between order statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "L: ClassLabel")]
pub struct DatasetStats<L: ClassLabel> {
    pub count: usize,
    pub mean_len: f64,
    pub std_len: f64,
    pub min_len: usize,
    pub max_len: usize,
    pub p25: f64,
    pub p75: f64,
    pub per_label_counts: BTreeMap<L, usize>,
}

pub(crate) fn percentile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn dataset_stats<L: ClassLabel>(samples: &[LabeledSample<L>]) -> Result<DatasetStats<L>> {
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut lens: Vec<f64> = samples.iter().map(|s| s.text.split_whitespace().count() as f64).collect();
    lens.sort_by(f64::total_cmp);
    let n = lens.len() as f64;
    let mean = lens.iter().sum::<f64>() / n;
    let std = if lens.len() > 1 { (lens.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    Ok(DatasetStats {
        count: samples.len(),
        mean_len: mean,
        std_len: std,
        min_len: lens[0] as usize,
        max_len: lens[lens.len() - 1] as usize,
        p25: percentile(&lens, 0.25),
        p75: percentile(&lens, 0.75),
        per_label_counts: label_counts(samples),
    })
}
