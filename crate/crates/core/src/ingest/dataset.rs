//! Labeled samples and the line-delimited JSON dataset format.
//!
//! One JSON object per line with the keys `id`, `text`, `label`,
//! `annotator_label`, `provenance` and `audit`, always in that order.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{BinaryLabel, ClassLabel, TargetLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    Tracker,
    NonTargetSource,
}

/// One label change made during a review round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "L: ClassLabel")]
pub struct AuditEntry<L = TargetLabel> {
    pub round: u32,
    pub old_label: L,
    pub new_label: L,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "L: ClassLabel")]
pub struct LabeledSample<L = TargetLabel> {
    pub id: String,
    pub text: String,
    pub label: L,
    /// Label assigned by the upstream expert annotators, when known.
    pub annotator_label: Option<L>,
    pub provenance: Provenance,
    #[serde(default)]
    pub audit: Vec<AuditEntry<L>>,
}

impl<L: ClassLabel> LabeledSample<L> {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: L, provenance: Provenance) -> Self {
        LabeledSample { id: id.into(), text: text.into(), label, annotator_label: None, provenance, audit: Vec::new() }
    }
}

/// Checks id uniqueness and strictly increasing audit rounds.
pub fn validate<L: ClassLabel>(samples: &[LabeledSample<L>]) -> Result<()> {
    let mut seen = HashSet::with_capacity(samples.len());
    for s in samples {
        if !seen.insert(s.id.as_str()) {
            return Err(Error::Input(format!("duplicate sample id {:?}", s.id)));
        }
        for pair in s.audit.windows(2) {
            if pair[1].round <= pair[0].round {
                return Err(Error::AuditOrder { sample_id: s.id.clone(), round: pair[1].round, last: pair[0].round });
            }
        }
    }
    Ok(())
}

pub fn label_counts<L: ClassLabel>(samples: &[LabeledSample<L>]) -> BTreeMap<L, usize> {
    let mut counts: BTreeMap<L, usize> = L::ALL.iter().map(|l| (*l, 0)).collect();
    for s in samples {
        *counts.entry(s.label).or_default() += 1;
    }
    counts
}

/// Collapses net-zero and reduction labels into one target class.
pub fn to_binary(samples: &[LabeledSample<TargetLabel>]) -> Vec<LabeledSample<BinaryLabel>> {
    samples
        .iter()
        .map(|s| LabeledSample {
            id: s.id.clone(),
            text: s.text.clone(),
            label: s.label.to_binary(),
            annotator_label: s.annotator_label.map(TargetLabel::to_binary),
            provenance: s.provenance,
            audit: s
                .audit
                .iter()
                .map(|a| AuditEntry { round: a.round, old_label: a.old_label.to_binary(), new_label: a.new_label.to_binary() })
                .collect(),
        })
        .collect()
}

pub fn to_jsonl<L: ClassLabel>(samples: &[LabeledSample<L>]) -> String {
    let mut out = String::new();
    for s in samples {
        out.push_str(&serde_json::to_string(s).expect("sample serializes"));
        out.push('\n');
    }
    out
}

pub fn from_jsonl<L: ClassLabel>(text: &str) -> Result<Vec<LabeledSample<L>>> {
    parse_lines(BufReader::new(text.as_bytes()), "dataset")
}

fn parse_lines<L: ClassLabel>(reader: impl BufRead, context: &str) -> Result<Vec<LabeledSample<L>>> {
    let mut samples = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::parse(context, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let sample = serde_json::from_str(&line).map_err(|e| Error::parse(format!("{context} line {}", lineno + 1), e))?;
        samples.push(sample);
    }
    validate(&samples)?;
    Ok(samples)
}

pub fn read_dataset<L: ClassLabel>(path: &Path) -> Result<Vec<LabeledSample<L>>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_lines(BufReader::new(file), &path.display().to_string())
}

pub fn write_dataset<L: ClassLabel>(path: &Path, samples: &[LabeledSample<L>]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(to_jsonl(samples).as_bytes()).map_err(|e| Error::io(path, e))
}
