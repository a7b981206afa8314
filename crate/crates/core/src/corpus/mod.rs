//! Two-stage analysis of transcript corpora.
//!
//! Each document is split into sentences. A climate detector labels every
//! sentence, the target classifier then labels only the climate sentences,
//! and per-event shares of net-zero and reduction sentences are averaged
//! into a yearly index.

mod aggregate;
mod document;
mod sentences;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

pub use aggregate::{
    emit_timeseries, event_share, parse_timeseries, read_timeseries, timeseries_chart, timeseries_tsv, yearly_index, Aggregation,
    EventShare, YearlyIndex, TIMESERIES_HEADER,
};
pub use document::{read_corpus, read_document, write_corpus, Document, Quarter};
pub use sentences::split_sentences;

use crate::classifier::ModelHandle;
use crate::error::{Error, Result};
use crate::hitl::ReviewItem;
use crate::label::{ClassLabel, ClimateLabel, TargetLabel};

/// Anything that assigns one label per sentence.
pub trait SentenceClassifier<L>: Send + Sync {
    fn classify(&self, texts: &[&str]) -> Result<Vec<L>>;
}

impl<L: ClassLabel> SentenceClassifier<L> for ModelHandle<L> {
    fn classify(&self, texts: &[&str]) -> Result<Vec<L>> {
        Ok(self.predict(texts)?.into_iter().map(|p| p.label).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub doc_id: String,
    pub index: usize,
    pub text: String,
    pub is_climate: bool,
    /// `NONE` for every non-climate sentence.
    pub target: TargetLabel,
}

/// Runs `model` over `texts`; on failure, retries sentence by sentence to
/// name the offending index (`offsets[i]` is the index reported for
/// `texts[i]`).
fn classify_located<L>(model: &dyn SentenceClassifier<L>, texts: &[&str], offsets: &[usize]) -> Result<Vec<L>> {
    let failure = |i: usize, message: String| Error::Model { index: offsets[i], message };
    match model.classify(texts) {
        Ok(labels) if labels.len() == texts.len() => Ok(labels),
        Ok(labels) => {
            Err(failure(labels.len().min(texts.len().saturating_sub(1)), format!("{} labels for {} sentences", labels.len(), texts.len())))
        }
        Err(batch_err) => {
            for (i, t) in texts.iter().enumerate() {
                if let Err(e) = model.classify(&[t]) {
                    return Err(failure(i, e.to_string()));
                }
            }
            Err(failure(0, batch_err.to_string()))
        }
    }
}

/// Climate detection for every sentence, then target classification for the
/// climate sentences only. Stage two is not called when no sentence is about
/// climate.
pub fn two_stage_classify(
    doc_id: &str,
    sentences: &[String],
    climate: &dyn SentenceClassifier<ClimateLabel>,
    target: &dyn SentenceClassifier<TargetLabel>,
) -> Result<Vec<SentenceRecord>> {
    let texts: Vec<&str> = sentences.iter().map(String::as_str).collect();
    let all: Vec<usize> = (0..texts.len()).collect();
    let stage1 = if texts.is_empty() { Vec::new() } else { classify_located(climate, &texts, &all)? };
    let climate_idx: Vec<usize> = all.iter().copied().filter(|&i| stage1[i] == ClimateLabel::Climate).collect();
    let mut targets = vec![TargetLabel::None; texts.len()];
    if !climate_idx.is_empty() {
        let sub: Vec<&str> = climate_idx.iter().map(|&i| texts[i]).collect();
        for (&i, label) in climate_idx.iter().zip(classify_located(target, &sub, &climate_idx)?) {
            targets[i] = label;
        }
    }
    Ok(texts
        .iter()
        .enumerate()
        .map(|(i, t)| SentenceRecord {
            doc_id: doc_id.to_string(),
            index: i,
            text: t.to_string(),
            is_climate: stage1[i] == ClimateLabel::Climate,
            target: targets[i],
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusAnalysis {
    /// Sorted by doc id, then sentence index.
    pub records: Vec<SentenceRecord>,
    pub shares: Vec<EventShare>,
    pub index: Vec<YearlyIndex>,
}

fn analyze_one(
    doc: &Document,
    climate: &dyn SentenceClassifier<ClimateLabel>,
    target: &dyn SentenceClassifier<TargetLabel>,
) -> Result<(Vec<SentenceRecord>, EventShare)> {
    let sentences = split_sentences(&doc.body);
    let records = two_stage_classify(&doc.doc_id, &sentences, climate, target).map_err(|e| match e {
        Error::Model { index, message } => Error::Model { index, message: format!("{}: {message}", doc.doc_id) },
        other => other,
    })?;
    let share = event_share(&records, &doc.firm_id, doc.quarter)?;
    Ok((records, share))
}

/// Classifies every document (in parallel with the `parallel` feature) and
/// aggregates in doc-id order, so the result does not depend on scheduling.
pub fn analyze_corpus(
    docs: &[Document],
    climate: &dyn SentenceClassifier<ClimateLabel>,
    target: &dyn SentenceClassifier<TargetLabel>,
    mode: Aggregation,
) -> Result<CorpusAnalysis> {
    if docs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut order: Vec<&Document> = docs.iter().collect();
    order.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    #[cfg(feature = "parallel")]
    let per_doc: Vec<_> = {
        use rayon::prelude::*;
        order.par_iter().map(|d| analyze_one(d, climate, target)).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let per_doc: Vec<_> = order.iter().map(|d| analyze_one(d, climate, target)).collect::<Result<_>>()?;
    let mut records = Vec::new();
    let mut shares = Vec::with_capacity(per_doc.len());
    for (r, s) in per_doc {
        records.extend(r);
        shares.push(s);
    }
    let index = yearly_index(&shares, mode);
    Ok(CorpusAnalysis { records, shares, index })
}

/// Review sample for checking the pipeline by hand: every sentence labeled
/// as a target (when `include_targets`) plus `n_random` other sentences drawn
/// without replacement. Ids are `<doc_id>#<sentence index>`.
pub fn sample_for_handcheck(records: &[SentenceRecord], include_targets: bool, n_random: usize, seed: u64) -> Vec<ReviewItem> {
    let is_target = |r: &SentenceRecord| r.target != TargetLabel::None;
    let mut chosen: Vec<&SentenceRecord> = if include_targets { records.iter().filter(|r| is_target(r)).collect() } else { Vec::new() };
    let pool: Vec<&SentenceRecord> = records.iter().filter(|r| !is_target(r)).collect();
    let mut rng = crate::seed::rng(seed);
    let mut picks = sample(&mut rng, pool.len(), n_random.min(pool.len())).into_vec();
    picks.sort_unstable();
    chosen.extend(picks.into_iter().map(|i| pool[i]));
    chosen
        .into_iter()
        .map(|r| ReviewItem {
            sample_id: format!("{}#{}", r.doc_id, r.index),
            text: r.text.clone(),
            gold_label: None,
            predicted_label: r.target,
            fold: None,
            round: 0,
            correction: None,
            reviewer_note: None,
        })
        .collect()
}

/// Sentence records as tab-separated lines: `doc_id`, `index`,
/// `is_climate`, `target`, `text` (tabs and newlines in text become spaces).
pub fn records_tsv(records: &[SentenceRecord]) -> String {
    let mut out = String::from("doc_id\tindex\tis_climate\ttarget\ttext\n");
    for r in records {
        let text: String = r.text.chars().map(|c| if c == '\t' || c == '\n' || c == '\r' { ' ' } else { c }).collect();
        out.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", r.doc_id, r.index, r.is_climate, r.target, text));
    }
    out
}

/// Event shares as tab-separated lines.
pub fn shares_tsv(shares: &[EventShare]) -> String {
    let mut out = String::from("doc_id\tfirm_id\tquarter\tshare_net_zero\tshare_reduction\tn_sentences\n");
    for s in shares {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            s.doc_id, s.firm_id, s.quarter, s.share_net_zero, s.share_reduction, s.n_sentences
        ));
    }
    out
}
