//! Building the cleaned three-class dataset from tracker exports and
//! non-target sources.

pub mod agreement;
pub mod clean;
pub mod dataset;
pub mod mapping;
pub mod split;
pub mod stats;
pub mod tracker;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::label::{ClassLabel, TargetLabel};

pub use agreement::{compute_agreement, AgreementReport};
pub use clean::{clean_text, word_count};
pub use dataset::{from_jsonl, label_counts, read_dataset, to_binary, to_jsonl, write_dataset, AuditEntry, LabeledSample, Provenance};
pub use mapping::{aggregate_label, SubLabelMap};
pub use split::{stratified_kfold, stratified_kfold_labels, stratified_subsample, Split};
pub use stats::{dataset_stats, DatasetStats};
pub use tracker::{ActorType, ColumnMap, RawClaim};

pub const DEFAULT_MIN_WORDS: usize = 5;

/// Keeps samples whose cleaned text has at least `min_words` whitespace tokens.
pub fn filter_short<L: ClassLabel>(samples: Vec<LabeledSample<L>>, min_words: usize) -> Vec<LabeledSample<L>> {
    let min_words = min_words.max(1);
    samples.into_iter().filter(|s| word_count(&s.text) >= min_words).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestReport {
    pub before: DatasetStats<TargetLabel>,
    pub after: DatasetStats<TargetLabel>,
    pub removed: usize,
    /// Agreement between tracker labels and reviewed labels, when the export
    /// carries reviewed labels.
    pub agreement: Option<AgreementReport>,
}

/// Raw (uncleaned) samples: tracker claims first, then non-target texts.
///
/// The sample label is the reviewed label when present, otherwise the
/// aggregated tracker label, which is also kept as `annotator_label`.
pub fn raw_samples(claims: &[RawClaim], non_target: &[(Option<String>, String)], map: &SubLabelMap) -> Result<Vec<LabeledSample>> {
    let mut samples = Vec::with_capacity(claims.len() + non_target.len());
    let claim_ids = tracker::disambiguate(claims.iter().enumerate().map(|(i, c)| {
        if c.source_id.is_empty() {
            format!("trk-{i:05}")
        } else {
            format!("trk-{}", c.source_id)
        }
    }));
    for (claim, id) in claims.iter().zip(claim_ids) {
        let tracker_label = map.aggregate(&claim.fine_label)?;
        let mut s = LabeledSample::new(id, claim.text.clone(), claim.reviewed_label.unwrap_or(tracker_label), Provenance::Tracker);
        s.annotator_label = Some(tracker_label);
        samples.push(s);
    }
    let nt_ids = tracker::disambiguate(
        non_target.iter().enumerate().map(|(i, (id, _))| id.as_ref().map_or_else(|| format!("nt-{i:05}"), |id| format!("nt-{id}"))),
    );
    for ((_, text), id) in non_target.iter().zip(nt_ids) {
        samples.push(LabeledSample::new(id, text.clone(), TargetLabel::None, Provenance::NonTargetSource));
    }
    dataset::validate(&samples)?;
    Ok(samples)
}

/// Cleans and length-filters raw samples, reporting statistics before and
/// after processing.
pub fn clean_and_filter(raw: Vec<LabeledSample>, min_words: usize) -> Result<(Vec<LabeledSample>, IngestReport)> {
    let before = dataset_stats(&raw)?;
    let cleaned: Vec<LabeledSample> = raw
        .into_iter()
        .map(|mut s| {
            s.text = clean_text(&s.text);
            s
        })
        .collect();
    let kept = filter_short(cleaned, min_words);
    let after = dataset_stats(&kept)?;
    let with_annotator: Vec<(TargetLabel, TargetLabel)> = kept.iter().filter_map(|s| s.annotator_label.map(|a| (a, s.label))).collect();
    let agreement = if with_annotator.is_empty() {
        None
    } else {
        let (a, b): (Vec<_>, Vec<_>) = with_annotator.into_iter().unzip();
        Some(compute_agreement(&a, &b)?)
    };
    let report = IngestReport { removed: before.count - after.count, before, after, agreement };
    Ok((kept, report))
}
