use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::ambition::numbers::{numeric_tokens, NumericToken};
use crate::ambition::AmbitionDimension;
use crate::error::{Error, Result};

/// An extracted answer span and the backend's confidence in it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaAnswer {
    pub answer_text: String,
    /// Byte offset of the span in the context.
    pub start: usize,
    pub confidence: f64,
}

impl QaAnswer {
    pub fn empty() -> Self {
        QaAnswer { answer_text: String::new(), start: 0, confidence: 0.0 }
    }
}

/// Extractive question answering over one context passage.
///
/// Implementations answer `dimension.question()` and must return a span of
/// `context`.
pub trait QaBackend: Send + Sync {
    fn name(&self) -> &str;

    fn answer(&self, dimension: AmbitionDimension, context: &str) -> Result<QaAnswer>;
}

struct Cues {
    deadline: Regex,
    baseline_before: Regex,
    baseline_after: Regex,
    net_zero: Regex,
    reduction: Regex,
    percent_after: Regex,
}

fn cues() -> &'static Cues {
    static C: OnceLock<Cues> = OnceLock::new();
    C.get_or_init(|| {
        let re = |s: &str| Regex::new(s).expect("cue regex");
        Cues {
            deadline: re(r"(?:\bby|\buntil|\bbefore|\bno later than|\bin|\bthrough|\btill|\bwithin|\bby the end of|\bby end of)\s+(?:the\s+)?(?:year\s+|fy\s*|fiscal\s+year\s+)?$"),
            baseline_before: re(r"(?:\bfrom|\bagainst|\bcompared\s+(?:to|with)|\brelative\s+to|\bversus|\bvs\.?|\bover|\bsince|\bbelow|\bbase\s*-?\s*year|\bbaseline|\bbase|\bon|\bof)\s+(?:a\s+|the\s+|our\s+|its\s+)?(?:base\s*-?\s*year\s+|baseline\s+|fy\s*|fiscal\s+year\s+)?$"),
            baseline_after: re(r"^\s*(?:levels?\b|baseline\b|base\s*-?\s*year\b|base\b|figures\b|emissions\s+levels?\b|values?\b|as\s+(?:a|the)\s+base)"),
            net_zero: re(r"net[\s-]*zero|carbon[\s-]*neutral|climate[\s-]*neutral|carbon[\s-]*negative|climate[\s-]*positive|zero[\s-]*(?:carbon|emissions?)|net[\s-]*negative|emissions?[\s-]*neutral|ghg[\s-]*neutral"),
            reduction: re(r"reduc|\bcut|\blower|decreas|\bhalve|\bdrop|\bdecline|abate|\bless\b|\bbelow"),
            percent_after: re(r"^\s*(?:%|percent\b|per\s+cent\b|pct\b)"),
        }
    })
}

fn floor_boundary(s: &str, mut i: usize) -> usize {
    while !s.is_char_boundary(i) {
        i -= 1;
    }
    i
}

fn ceil_boundary(s: &str, mut i: usize) -> usize {
    while i < s.len() && !s.is_char_boundary(i) {
        i += 1;
    }
    i
}

fn left_of(s: &str, at: usize, width: usize) -> &str {
    &s[floor_boundary(s, at.saturating_sub(width))..at]
}

fn right_of(s: &str, at: usize, width: usize) -> &str {
    &s[at..ceil_boundary(s, (at + width).min(s.len()))]
}

/// Byte distance from `[start, end)` to the nearest match of `re`.
fn distance(re: &Regex, lower: &str, start: usize, end: usize) -> Option<usize> {
    re.find_iter(lower)
        .map(|m| {
            if m.end() <= start {
                start - m.end()
            } else if m.start() >= end {
                m.start() - end
            } else {
                0
            }
        })
        .min()
}

fn proximity(d: Option<usize>, scale: f64) -> f64 {
    d.map_or(0.0, |d| (-(d as f64) / scale).exp())
}

/// Rule-based stand-in for an extractive Q&A model.
///
/// Every numeric token is a candidate span. Candidates are scored with cue
/// words around them (deadline prepositions, baseline phrases, target
/// vocabulary, percent signs) and a softmax over the candidates plus a
/// no-answer score turns the scores into confidences.
#[derive(Debug, Clone)]
pub struct HeuristicQa {
    pub null_score: f64,
}

impl Default for HeuristicQa {
    fn default() -> Self {
        HeuristicQa { null_score: 0.5 }
    }
}

impl HeuristicQa {
    fn score(&self, dim: AmbitionDimension, lower: &str, t: &NumericToken, years: &[f64]) -> Option<(f64, usize)> {
        let c = cues();
        let left = left_of(lower, t.start, 48);
        let right = right_of(lower, t.end, 24);
        let percent = c.percent_after.find(right);
        let deadline = c.deadline.is_match(left);
        let baseline = c.baseline_before.is_match(left) || c.baseline_after.is_match(right);
        let near_nz = proximity(distance(&c.net_zero, lower, t.start, t.end), 40.0);
        let near_red = proximity(distance(&c.reduction, lower, t.start, t.end), 60.0);
        let is_year = t.is_year && (1900.0..=2200.0).contains(&t.value) && percent.is_none();
        let mut end = t.end;
        let s = match dim {
            AmbitionDimension::NzTargetYear => {
                if !is_year {
                    return None;
                }
                let mut s = 1.0 + 1.5 * f64::from(deadline) + 2.5 * near_nz - 2.5 * f64::from(baseline);
                if t.value < 2020.0 {
                    s -= 1.5;
                }
                s
            }
            AmbitionDimension::RedTargetYear => {
                if !is_year {
                    return None;
                }
                let mut s = 1.0 + 2.0 * f64::from(deadline) + 1.0 * near_red - 3.0 * f64::from(baseline) - 1.0 * near_nz;
                if t.value < 2015.0 {
                    s -= 1.5;
                }
                s
            }
            AmbitionDimension::RedBaseYear => {
                if !is_year {
                    return None;
                }
                let earliest = years.iter().all(|&y| y >= t.value);
                0.5 + 3.0 * f64::from(baseline) - 1.5 * f64::from(deadline) + 0.5 * f64::from(earliest && years.len() > 1)
            }
            AmbitionDimension::RedPercentage => {
                if is_year || t.value <= 0.0 || t.value > 100.0 {
                    return None;
                }
                if let Some(p) = percent {
                    end = t.end + p.end();
                }
                0.5 + 3.0 * f64::from(percent.is_some()) + 1.0 * near_red - 1.0 * f64::from(deadline)
            }
        };
        Some((s, end))
    }
}

impl QaBackend for HeuristicQa {
    fn name(&self) -> &str {
        "heuristic"
    }

    fn answer(&self, dimension: AmbitionDimension, context: &str) -> Result<QaAnswer> {
        // lowercasing ASCII keeps byte offsets aligned with `context`
        let lower = context.to_ascii_lowercase();
        let tokens = numeric_tokens(context);
        let years: Vec<f64> = tokens.iter().filter(|t| t.is_year).map(|t| t.value).collect();
        let scored: Vec<(f64, usize, usize)> =
            tokens.iter().filter_map(|t| self.score(dimension, &lower, t, &years).map(|(s, end)| (s, t.start, end))).collect();
        let Some(&(best, start, end)) = scored.iter().fold(None, |acc: Option<&(f64, usize, usize)>, x| match acc {
            Some(a) if a.0 >= x.0 => Some(a),
            _ => Some(x),
        }) else {
            return Ok(QaAnswer::empty());
        };
        let max = scored.iter().map(|x| x.0).fold(self.null_score, f64::max);
        let z: f64 = scored.iter().map(|x| (x.0 - max).exp()).sum::<f64>() + (self.null_score - max).exp();
        let confidence = ((best - max).exp() / z).clamp(0.0, 1.0);
        Ok(QaAnswer { answer_text: context[start..end].to_string(), start, confidence })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplayRecord {
    pub dimension: AmbitionDimension,
    pub context: String,
    pub answer_text: String,
    pub confidence: f64,
}

/// Answers recorded from an external Q&A model, looked up by dimension and
/// exact context. One JSON record per line.
#[derive(Debug, Default)]
pub struct ReplayQa {
    answers: HashMap<(AmbitionDimension, String), (String, f64)>,
}

impl ReplayQa {
    pub fn new(records: impl IntoIterator<Item = ReplayRecord>) -> Self {
        ReplayQa { answers: records.into_iter().map(|r| ((r.dimension, r.context), (r.answer_text, r.confidence))).collect() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut records = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let r = serde_json::from_str(&line).map_err(|e| Error::parse(format!("{} line {}", path.display(), i + 1), e))?;
            records.push(r);
        }
        Ok(Self::new(records))
    }
}

impl QaBackend for ReplayQa {
    fn name(&self) -> &str {
        "replay"
    }

    fn answer(&self, dimension: AmbitionDimension, context: &str) -> Result<QaAnswer> {
        let (text, confidence) = self
            .answers
            .get(&(dimension, context.to_string()))
            .ok_or_else(|| Error::Extraction(format!("no recorded {dimension} answer for context")))?;
        let start = context
            .find(text.as_str())
            .ok_or_else(|| Error::Extraction(format!("recorded answer {text:?} is not a span of its context")))?;
        Ok(QaAnswer { answer_text: text.clone(), start, confidence: *confidence })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambition::answer_matches;
    use AmbitionDimension::*;

    fn ask(dim: AmbitionDimension, text: &str) -> QaAnswer {
        HeuristicQa::default().answer(dim, text).unwrap()
    }

    #[test]
    fn reduction_claim_dimensions() {
        let s = "We will cut emissions 40% by 2035 against 2018 levels.";
        assert!(answer_matches(&ask(RedTargetYear, s).answer_text, 2035.0, RedTargetYear));
        assert!(answer_matches(&ask(RedBaseYear, s).answer_text, 2018.0, RedBaseYear));
        assert_eq!(ask(RedPercentage, s).answer_text, "40%");
    }

    #[test]
    fn net_zero_year_beats_interim_year() {
        let s = "We aim to halve emissions by 2030 and to reach net zero by 2050.";
        assert_eq!(ask(NzTargetYear, s).answer_text, "2050");
        assert_eq!(ask(RedTargetYear, s).answer_text, "2030");
    }

    #[test]
    fn no_number_gives_empty_answer() {
        let a = ask(NzTargetYear, "We support the Paris Agreement.");
        assert_eq!(a, QaAnswer::empty());
    }

    #[test]
    fn handles_multibyte_text() {
        let s = "Ziel: Klimaneutralität – net zero bis 2045 — ✓ 2040";
        let a = ask(NzTargetYear, s);
        assert_eq!(&s[a.start..a.start + a.answer_text.len()], a.answer_text);
    }

    #[test]
    fn replay_checks_span() {
        let ctx = "Net zero by 2040.";
        let r = ReplayQa::new([
            ReplayRecord { dimension: NzTargetYear, context: ctx.into(), answer_text: "2040".into(), confidence: 0.8 },
            ReplayRecord { dimension: RedBaseYear, context: ctx.into(), answer_text: "1990".into(), confidence: 0.8 },
        ]);
        assert_eq!(r.answer(NzTargetYear, ctx).unwrap().start, 12);
        assert!(matches!(r.answer(RedBaseYear, ctx), Err(Error::Extraction(_))));
        assert!(matches!(r.answer(RedPercentage, ctx), Err(Error::Extraction(_))));
    }
}
