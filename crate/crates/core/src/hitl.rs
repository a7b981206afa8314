//! Label auditing loop: export cross-validation misclassifications for
//! review, then import the reviewer's corrections with an audit trail.
//!
//! Review files are comma-separated with a header row:
//!
//! ```text
//! sample_id,text,gold_label,predicted_label,fold,round,correction,reviewer_note
//! ```
//!
//! `correction` is empty, one of `NET_ZERO`, `REDUCTION`, `NONE`, or
//! `REMOVE`. Removed samples are not deleted from the dataset; they are listed
//! in a separate exclusions file (`sample_id,round,reviewer_note`) and
//! filtered out with [`active_samples`].

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifier::CvReport;
use crate::error::{Error, Result};
use crate::ingest::{AuditEntry, LabeledSample};
use crate::label::TargetLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Correction {
    Relabel(TargetLabel),
    Remove,
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Correction::Relabel(l) => write!(f, "{l}"),
            Correction::Remove => f.write_str("REMOVE"),
        }
    }
}

impl FromStr for Correction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("remove") {
            Ok(Correction::Remove)
        } else {
            s.parse().map(Correction::Relabel)
        }
    }
}

impl TryFrom<String> for Correction {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Correction> for String {
    fn from(c: Correction) -> String {
        c.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewItem {
    pub sample_id: String,
    pub text: String,
    /// Empty for hand-check samples that never had a gold label.
    pub gold_label: Option<TargetLabel>,
    pub predicted_label: TargetLabel,
    pub fold: Option<usize>,
    pub round: u32,
    pub correction: Option<Correction>,
    pub reviewer_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub sample_id: String,
    pub round: u32,
    pub reviewer_note: Option<String>,
}

/// One review item per held-out misclassification, sorted by fold and id.
pub fn collect_misclassifications(report: &CvReport<TargetLabel>, samples: &[LabeledSample], round: u32) -> Result<Vec<ReviewItem>> {
    let predictions = report.predictions.as_ref().ok_or(Error::MissingPredictions)?;
    let texts: HashMap<&str, &str> = samples.iter().map(|s| (s.id.as_str(), s.text.as_str())).collect();
    let mut items = Vec::new();
    for p in predictions.iter().filter(|p| p.gold != p.predicted) {
        let text = texts.get(p.sample_id.as_str()).ok_or_else(|| Error::UnknownSample(p.sample_id.clone()))?;
        items.push(ReviewItem {
            sample_id: p.sample_id.clone(),
            text: text.to_string(),
            gold_label: Some(p.gold),
            predicted_label: p.predicted,
            fold: Some(p.fold),
            round,
            correction: None,
            reviewer_note: None,
        });
    }
    items.sort_by(|a, b| a.fold.cmp(&b.fold).then_with(|| a.sample_id.cmp(&b.sample_id)));
    Ok(items)
}

pub fn write_review<W: Write>(out: W, items: &[ReviewItem]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for item in items {
        w.serialize(item).map_err(|e| Error::parse("review file", e))?;
    }
    if items.is_empty() {
        w.write_record(["sample_id", "text", "gold_label", "predicted_label", "fold", "round", "correction", "reviewer_note"])
            .map_err(|e| Error::parse("review file", e))?;
    }
    w.flush().map_err(|e| Error::parse("review file", e))
}

pub fn parse_review<R: Read>(input: R) -> Result<Vec<ReviewItem>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| Error::parse(format!("review row {}", i + 1), e)))
        .collect()
}

pub fn save_review(path: &Path, items: &[ReviewItem]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_review(file, items)
}

pub fn load_review(path: &Path) -> Result<Vec<ReviewItem>> {
    parse_review(fs::File::open(path).map_err(|e| Error::io(path, e))?)
}

pub fn save_exclusions(path: &Path, exclusions: &[Exclusion]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    if exclusions.is_empty() {
        w.write_record(["sample_id", "round", "reviewer_note"]).map_err(|e| Error::parse("exclusions", e))?;
    }
    for x in exclusions {
        w.serialize(x).map_err(|e| Error::parse("exclusions", e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// A missing file means no exclusions yet.
pub fn load_exclusions(path: &Path) -> Result<Vec<Exclusion>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    csv::Reader::from_reader(file).deserialize().map(|r| r.map_err(|e| Error::parse(path.display().to_string(), e))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub samples: Vec<LabeledSample>,
    pub exclusions: Vec<Exclusion>,
    pub relabeled: usize,
    pub removed: usize,
    pub warnings: Vec<String>,
}

/// Applies the corrections of a review file.
///
/// Relabels append an audit entry tagged with the item's round. A correction
/// that matches the current label, or a removal of an already excluded
/// sample, is skipped with a warning, which makes re-applying a file a no-op.
/// The sample count never changes.
pub fn apply_corrections(samples: Vec<LabeledSample>, exclusions: Vec<Exclusion>, review: &[ReviewItem]) -> Result<Applied> {
    let mut samples = samples;
    let mut exclusions = exclusions;
    let index: HashMap<String, usize> = samples.iter().enumerate().map(|(i, s)| (s.id.clone(), i)).collect();
    let mut excluded: HashSet<String> = exclusions.iter().map(|x| x.sample_id.clone()).collect();
    let (mut relabeled, mut removed) = (0, 0);
    let mut warnings = Vec::new();
    for item in review {
        let Some(correction) = item.correction else { continue };
        let &i = index.get(&item.sample_id).ok_or_else(|| Error::UnknownSample(item.sample_id.clone()))?;
        match correction {
            Correction::Remove => {
                if excluded.insert(item.sample_id.clone()) {
                    exclusions.push(Exclusion {
                        sample_id: item.sample_id.clone(),
                        round: item.round,
                        reviewer_note: item.reviewer_note.clone(),
                    });
                    removed += 1;
                } else {
                    warnings.push(format!("{} is already excluded", item.sample_id));
                }
            }
            Correction::Relabel(label) => {
                let s = &mut samples[i];
                if s.label == label {
                    warnings.push(format!("{} already has label {label}", item.sample_id));
                    continue;
                }
                if let Some(last) = s.audit.last() {
                    if item.round <= last.round {
                        return Err(Error::AuditOrder { sample_id: s.id.clone(), round: item.round, last: last.round });
                    }
                }
                s.audit.push(AuditEntry { round: item.round, old_label: s.label, new_label: label });
                s.label = label;
                relabeled += 1;
            }
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(Applied { samples, exclusions, relabeled, removed, warnings })
}

/// Samples not listed in `exclusions`.
pub fn active_samples(samples: &[LabeledSample], exclusions: &[Exclusion]) -> Vec<LabeledSample> {
    let excluded: HashSet<&str> = exclusions.iter().map(|x| x.sample_id.as_str()).collect();
    samples.iter().filter(|s| !excluded.contains(s.id.as_str())).cloned().collect()
}

/// Undoes every audited change, newest first, and returns the samples as
/// they were before the first review round. Fails if a trail does not chain
/// (an entry's new label differs from the label that followed it).
pub fn replay_reverse(samples: &[LabeledSample]) -> Result<Vec<LabeledSample>> {
    samples
        .iter()
        .map(|s| {
            let mut label = s.label;
            for entry in s.audit.iter().rev() {
                if entry.new_label != label {
                    return Err(Error::Input(format!("audit trail of {} does not chain at round {}", s.id, entry.round)));
                }
                label = entry.old_label;
            }
            Ok(LabeledSample { label, audit: Vec::new(), ..s.clone() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{ConfusionMatrix, MetricSummary, SamplePrediction};
    use crate::ingest::Provenance;
    use TargetLabel::*;

    fn ds() -> Vec<LabeledSample> {
        [("a", NetZero), ("b", Reduction), ("c", None), ("d", None)]
            .iter()
            .map(|(id, l)| LabeledSample::new(*id, format!("text {id}"), *l, Provenance::Tracker))
            .collect()
    }

    fn report(preds: Option<Vec<SamplePrediction<TargetLabel>>>) -> CvReport<TargetLabel> {
        CvReport {
            base_model_id: "stub".into(),
            k: 2,
            per_fold: vec![],
            summary: MetricSummary::default(),
            confusion: ConfusionMatrix::new::<TargetLabel>(),
            fold_label_counts: vec![],
            predictions: preds,
        }
    }

    fn pred(id: &str, fold: usize, gold: TargetLabel, predicted: TargetLabel) -> SamplePrediction<TargetLabel> {
        SamplePrediction { sample_id: id.into(), fold, gold, predicted, probabilities: vec![] }
    }

    fn fix(id: &str, round: u32, c: Correction) -> ReviewItem {
        ReviewItem {
            sample_id: id.into(),
            text: String::new(),
            gold_label: Option::None,
            predicted_label: None,
            fold: Option::None,
            round,
            correction: Some(c),
            reviewer_note: Option::None,
        }
    }

    #[test]
    fn missing_predictions_error() {
        assert!(matches!(collect_misclassifications(&report(Option::None), &ds(), 1), Err(Error::MissingPredictions)));
    }

    #[test]
    fn collects_sorted_errors() {
        let preds = vec![
            pred("d", 1, None, Reduction),
            pred("a", 0, NetZero, NetZero),
            pred("c", 0, None, NetZero),
            pred("b", 1, Reduction, Reduction),
        ];
        let items = collect_misclassifications(&report(Some(preds)), &ds(), 1).unwrap();
        let ids: Vec<_> = items.iter().map(|i| i.sample_id.as_str()).collect();
        assert_eq!(ids, ["c", "d"]);
        assert!(items.iter().all(|i| i.gold_label != Some(i.predicted_label)));
    }

    #[test]
    fn review_round_trip_with_awkward_text() {
        let mut item = fix("a", 2, Correction::Remove);
        item.text = "He said, \"net zero\"\nby 2050".into();
        item.reviewer_note = Some("duplicate, see b".into());
        let mut buf = Vec::new();
        write_review(&mut buf, &[item.clone(), fix("b", 2, Correction::Relabel(Reduction))]).unwrap();
        let back = parse_review(buf.as_slice()).unwrap();
        assert_eq!(back[0], item);
        assert_eq!(back[1].correction, Some(Correction::Relabel(Reduction)));
        let mut empty = Vec::new();
        write_review(&mut empty, &[]).unwrap();
        assert!(parse_review(empty.as_slice()).unwrap().is_empty());
    }

    #[test]
    fn single_correction_is_local() {
        let before = ds();
        let out = apply_corrections(before.clone(), vec![], &[fix("c", 1, Correction::Relabel(Reduction))]).unwrap();
        assert_eq!(out.relabeled, 1);
        assert_eq!(out.samples[2].label, Reduction);
        assert_eq!(out.samples[2].audit, vec![AuditEntry { round: 1, old_label: None, new_label: Reduction }]);
        for i in [0, 1, 3] {
            assert_eq!(out.samples[i], before[i]);
        }
    }

    #[test]
    fn unknown_sample_rejected() {
        let r = apply_corrections(ds(), vec![], &[fix("zz", 1, Correction::Relabel(None))]);
        assert!(matches!(r, Err(Error::UnknownSample(id)) if id == "zz"));
    }

    #[test]
    fn removal_is_tombstoned() {
        let out = apply_corrections(ds(), vec![], &[fix("b", 1, Correction::Remove)]).unwrap();
        assert_eq!(out.samples.len(), 4);
        assert_eq!(out.exclusions.len(), 1);
        assert_eq!(active_samples(&out.samples, &out.exclusions).len(), 3);
        let again = apply_corrections(out.samples.clone(), out.exclusions.clone(), &[fix("b", 1, Correction::Remove)]).unwrap();
        assert_eq!(again.exclusions, out.exclusions);
        assert_eq!(again.warnings.len(), 1);
    }

    #[test]
    fn out_of_order_round_rejected() {
        let out = apply_corrections(ds(), vec![], &[fix("a", 2, Correction::Relabel(None))]).unwrap();
        let r = apply_corrections(out.samples, vec![], &[fix("a", 1, Correction::Relabel(Reduction))]);
        assert!(matches!(r, Err(Error::AuditOrder { round: 1, last: 2, .. })));
    }

    #[test]
    fn exclusions_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exclusions.csv");
        assert!(load_exclusions(&path).unwrap().is_empty());
        save_exclusions(&path, &[]).unwrap();
        assert!(load_exclusions(&path).unwrap().is_empty());
        let xs = vec![Exclusion { sample_id: "a".into(), round: 1, reviewer_note: Some("meaningless".into()) }];
        save_exclusions(&path, &xs).unwrap();
        assert_eq!(load_exclusions(&path).unwrap(), xs);
    }

    #[test]
    fn correction_parsing() {
        assert_eq!("remove".parse::<Correction>().unwrap(), Correction::Remove);
        assert_eq!("NET_ZERO".parse::<Correction>().unwrap(), Correction::Relabel(NetZero));
        assert!("maybe".parse::<Correction>().is_err());
    }
}
