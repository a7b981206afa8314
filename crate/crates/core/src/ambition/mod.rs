//! Quantitative ambition of targets: target year, baseline year and reduction
//! percentage, read off claims by an extractive Q&A backend.

mod io;
mod numbers;
mod qa;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use io::{parse_claims_tsv, parse_gold_tsv, read_claims_tsv, read_curve_tsv, read_gold_tsv, write_curve_tsv, CurvePoint};
pub use numbers::{answer_matches, numeric_tokens, NumericToken};
pub use qa::{HeuristicQa, QaAnswer, QaBackend, ReplayQa, ReplayRecord};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AmbitionDimension {
    NzTargetYear,
    RedTargetYear,
    RedBaseYear,
    RedPercentage,
}

impl AmbitionDimension {
    pub const ALL: [AmbitionDimension; 4] = [Self::NzTargetYear, Self::RedTargetYear, Self::RedBaseYear, Self::RedPercentage];

    /// The question posed to the Q&A model.
    pub fn question(self) -> &'static str {
        match self {
            Self::NzTargetYear => "When does the organization want to achieve net zero?",
            Self::RedTargetYear => "By which year does the organization want to reduce its emissions?",
            Self::RedBaseYear => "What is the baseline year or level for the target to which the reduction target is compared to?",
            Self::RedPercentage => "What is the reduction target of the organization in %?",
        }
    }

    pub fn is_year(self) -> bool {
        self != Self::RedPercentage
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::NzTargetYear => "NZ_TARGET_YEAR",
            Self::RedTargetYear => "RED_TARGET_YEAR",
            Self::RedBaseYear => "RED_BASE_YEAR",
            Self::RedPercentage => "RED_PERCENTAGE",
        }
    }

    /// Checks the value range: years are integers in 1900..=2200, percentages
    /// lie in (0, 100].
    pub fn validate_gold(self, value: f64) -> Result<()> {
        let ok = if self.is_year() { value.fract() == 0.0 && (1900.0..=2200.0).contains(&value) } else { value > 0.0 && value <= 100.0 };
        if ok {
            Ok(())
        } else {
            Err(Error::Input(format!("gold value {value} out of range for {self}")))
        }
    }
}

pub fn question_for(dimension: AmbitionDimension) -> &'static str {
    dimension.question()
}

impl fmt::Display for AmbitionDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AmbitionDimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Self::ALL.into_iter().find(|d| d.name() == norm).ok_or_else(|| Error::Input(format!("unknown ambition dimension {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbitionGold {
    pub sample_id: String,
    pub dimension: AmbitionDimension,
    pub gold_value: f64,
}

/// Runs the backend and enforces the extractive contract.
pub fn extract(backend: &dyn QaBackend, text: &str, dimension: AmbitionDimension) -> Result<QaAnswer> {
    if text.trim().is_empty() {
        return Err(Error::Extraction("empty text".into()));
    }
    let mut a = backend.answer(dimension, text).map_err(|e| match e {
        Error::Extraction(m) => Error::Extraction(m),
        other => Error::Extraction(format!("{} backend: {other}", backend.name())),
    })?;
    let end = a.start + a.answer_text.len();
    if text.get(a.start..end) != Some(a.answer_text.as_str()) {
        return Err(Error::Extraction(format!("{} returned a span outside the text", backend.name())));
    }
    if !a.confidence.is_finite() {
        return Err(Error::Extraction(format!("{} returned a non-finite confidence", backend.name())));
    }
    a.confidence = a.confidence.clamp(0.0, 1.0);
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "threshold", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EvalMode {
    /// Every sample.
    Raw,
    /// Only samples whose text contains the gold value.
    Optimal,
    /// Only answers with confidence at or above the threshold.
    Confidence(f64),
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalMode::Raw => f.write_str("raw"),
            EvalMode::Optimal => f.write_str("optimal"),
            EvalMode::Confidence(t) => write!(f, "confidence@{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub dimension: AmbitionDimension,
    pub mode: EvalMode,
    /// `None` when the mode retains no sample.
    pub accuracy: Option<f64>,
    pub coverage: f64,
    pub n_total: usize,
    pub retained_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredAnswer {
    pub sample_id: String,
    pub gold_value: f64,
    pub answer: QaAnswer,
    pub correct: bool,
    /// Whether the full text contains the gold value at all.
    pub answerable: bool,
}

/// Extracted answers for one dimension; every mode is scored from these
/// without calling the backend again.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionRun {
    pub dimension: AmbitionDimension,
    pub items: Vec<ScoredAnswer>,
}

impl DimensionRun {
    /// Runs extraction for every gold record of `dimension`, in gold order.
    pub fn new(
        golds: &[AmbitionGold],
        texts: &HashMap<String, String>,
        backend: &dyn QaBackend,
        dimension: AmbitionDimension,
    ) -> Result<Self> {
        let golds: Vec<&AmbitionGold> = golds.iter().filter(|g| g.dimension == dimension).collect();
        if golds.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut jobs = Vec::with_capacity(golds.len());
        for g in &golds {
            let text = texts.get(&g.sample_id).ok_or_else(|| Error::Input(format!("no text for sample {}", g.sample_id)))?;
            jobs.push((*g, text.as_str()));
        }
        let run = |(g, text): &(&AmbitionGold, &str)| -> Result<ScoredAnswer> {
            let answer = extract(backend, text, dimension)?;
            Ok(ScoredAnswer {
                sample_id: g.sample_id.clone(),
                gold_value: g.gold_value,
                correct: answer_matches(&answer.answer_text, g.gold_value, dimension),
                answerable: answer_matches(text, g.gold_value, dimension),
                answer,
            })
        };
        #[cfg(feature = "parallel")]
        let items = {
            use rayon::prelude::*;
            jobs.par_iter().map(run).collect::<Result<Vec<_>>>()?
        };
        #[cfg(not(feature = "parallel"))]
        let items = jobs.iter().map(run).collect::<Result<Vec<_>>>()?;
        Ok(DimensionRun { dimension, items })
    }

    pub fn evaluate(&self, mode: EvalMode) -> EvalResult {
        let keep = |s: &ScoredAnswer| match mode {
            EvalMode::Raw => true,
            EvalMode::Optimal => s.answerable,
            EvalMode::Confidence(t) => s.answer.confidence >= t,
        };
        let retained: Vec<&ScoredAnswer> = self.items.iter().filter(|s| keep(s)).collect();
        let n_total = self.items.len();
        let correct = retained.iter().filter(|s| s.correct).count();
        EvalResult {
            dimension: self.dimension,
            mode,
            accuracy: (!retained.is_empty()).then(|| correct as f64 / retained.len() as f64),
            coverage: retained.len() as f64 / n_total as f64,
            n_total,
            retained_ids: retained.iter().map(|s| s.sample_id.clone()).collect(),
        }
    }

    pub fn curve(&self, thresholds: &[f64]) -> Result<Vec<EvalResult>> {
        check_thresholds(thresholds)?;
        Ok(thresholds.iter().map(|&t| self.evaluate(EvalMode::Confidence(t))).collect())
    }
}

fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::Input("thresholds must lie in [0, 1]".into()));
    }
    if thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Input("thresholds must be sorted ascending".into()));
    }
    Ok(())
}

pub fn evaluate_dimension(
    golds: &[AmbitionGold],
    texts: &HashMap<String, String>,
    backend: &dyn QaBackend,
    dimension: AmbitionDimension,
    mode: EvalMode,
) -> Result<EvalResult> {
    if let EvalMode::Confidence(t) = mode {
        check_thresholds(&[t])?;
    }
    Ok(DimensionRun::new(golds, texts, backend, dimension)?.evaluate(mode))
}

pub fn accuracy_coverage_curve(
    golds: &[AmbitionGold],
    texts: &HashMap<String, String>,
    backend: &dyn QaBackend,
    dimension: AmbitionDimension,
    thresholds: &[f64],
) -> Result<Vec<EvalResult>> {
    check_thresholds(thresholds)?;
    DimensionRun::new(golds, texts, backend, dimension)?.curve(thresholds)
}

/// Evenly spaced thresholds from `start` to `stop` inclusive. Points are
/// rounded to 1e-9 so that `0:1:0.05` gives exactly 21 clean values.
pub fn threshold_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(Error::Input(format!("bad threshold grid {start}:{stop}:{step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect())
}
