use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::dataset::LabeledSample;
use crate::label::ClassLabel;
use crate::seed;

/// Index sets of one cross-validation fold. Both lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
}

/// Label-wise shuffled round-robin assignment into `k` folds.
///
/// Within each label (in label order) the indices are shuffled by one seeded
/// generator and dealt out as `position % k`, so per-label fold sizes differ
/// by at most one and lower-numbered folds receive the remainders.
pub fn stratified_kfold_labels<L: ClassLabel>(labels: &[L], k: usize, seed: u64) -> Result<Vec<Split>> {
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    let mut by_label: Vec<Vec<usize>> = vec![Vec::new(); L::ALL.len()];
    for (i, l) in labels.iter().enumerate() {
        by_label[l.index()].push(i);
    }
    for (label, idx) in L::ALL.iter().zip(&by_label) {
        if !idx.is_empty() && idx.len() < k {
            return Err(Error::StratificationInfeasible { label: label.to_string(), count: idx.len(), k });
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut rng = seed::rng(seed);
    let mut fold_of = vec![0usize; labels.len()];
    for idx in by_label.iter_mut() {
        idx.shuffle(&mut rng);
        for (pos, &i) in idx.iter().enumerate() {
            fold_of[i] = pos % k;
        }
    }
    Ok((0..k)
        .map(|f| {
            let (val, train): (Vec<usize>, Vec<usize>) = (0..labels.len()).partition(|&i| fold_of[i] == f);
            Split { train, val }
        })
        .collect())
}

pub fn stratified_kfold<L: ClassLabel>(samples: &[LabeledSample<L>], k: usize, seed: u64) -> Result<Vec<Split>> {
    let labels: Vec<L> = samples.iter().map(|s| s.label).collect();
    stratified_kfold_labels(&labels, k, seed)
}

/// Seeded per-label sample of roughly `fraction` of the data (at least one
/// item per present label). Returned indices are sorted.
pub fn stratified_subsample<L: ClassLabel>(labels: &[L], fraction: f64, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed);
    let mut picked = Vec::new();
    for label in L::ALL {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == *label).collect();
        if idx.is_empty() {
            continue;
        }
        idx.shuffle(&mut rng);
        let take = ((idx.len() as f64 * fraction).round() as usize).clamp(1, idx.len());
        picked.extend_from_slice(&idx[..take]);
    }
    picked.sort_unstable();
    picked
}
