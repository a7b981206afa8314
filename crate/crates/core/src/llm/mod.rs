//! Zero-shot baseline: ask a chat model to label each sample with a fixed
//! instruction prompt and score the answers like a classifier fold.
//!
//! Answers that cannot be mapped to a label count as wrong. Transport errors
//! are retried with exponential backoff; a sample whose calls keep failing is
//! recorded as unparseable with the last error attached.

mod client;
mod prompt;

use std::time::Duration;

use serde::{Deserialize, Serialize};

#[cfg(feature = "http")]
pub use client::HttpChatClient;
pub use client::{cache_key, CacheEntry, CachedClient, ChatClient, ConstantClient, GoldEchoClient, NoClient};
pub use prompt::{build_prompt, canonical_answer, parse_response, LlmVerdict, PromptTemplate, Verdict, DEFAULT_TEMPLATE};

use crate::classifier::config::Averaging;
use crate::classifier::metrics::{ConfusionMatrix, FoldMetrics};
use crate::error::{Error, Result};
use crate::ingest::LabeledSample;
use crate::label::{ClassLabel, TargetLabel};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ZeroShotOptions {
    /// Maximum concurrent client calls.
    pub max_in_flight: usize,
    /// Total attempts per sample, first call included.
    pub attempts: u32,
    /// Delay before the second attempt; doubles after each failure.
    pub backoff_ms: u64,
    pub averaging: Averaging,
}

impl Default for ZeroShotOptions {
    fn default() -> Self {
        ZeroShotOptions { max_in_flight: 4, attempts: 3, backoff_ms: 500, averaging: Averaging::Macro }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleVerdict {
    pub sample_id: String,
    pub gold: TargetLabel,
    pub verdict: LlmVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroShotReport {
    pub model: String,
    pub metrics: FoldMetrics,
    /// Parsed answers only; unparseable items are tallied separately.
    pub confusion: ConfusionMatrix,
    pub unparseable: usize,
    pub verdicts: Vec<SampleVerdict>,
}

fn call_with_retries(client: &dyn ChatClient, prompt: &str, opts: &ZeroShotOptions) -> Result<String> {
    let attempts = opts.attempts.max(1);
    let mut delay = opts.backoff_ms;
    let mut attempt = 1;
    loop {
        match client.complete(prompt) {
            Err(Error::Transport(msg)) if attempt < attempts => {
                log::warn!("chat call failed (attempt {attempt}/{attempts}): {msg}");
                if delay > 0 {
                    std::thread::sleep(Duration::from_millis(delay));
                }
                delay = delay.saturating_mul(2);
                attempt += 1;
            }
            other => return other,
        }
    }
}

fn judge(sample: &LabeledSample, template: &PromptTemplate, client: &dyn ChatClient, opts: &ZeroShotOptions) -> SampleVerdict {
    let outcome = template.render(&sample.text).and_then(|p| call_with_retries(client, &p, opts));
    let (verdict, error) = match outcome {
        Ok(raw) => (parse_response(&raw), None),
        Err(e) => (LlmVerdict { raw_response: String::new(), parsed: Verdict::Unparseable }, Some(e.to_string())),
    };
    SampleVerdict { sample_id: sample.id.clone(), gold: sample.label, verdict, error }
}

#[cfg(feature = "parallel")]
fn judge_all(
    samples: &[LabeledSample],
    template: &PromptTemplate,
    client: &dyn ChatClient,
    opts: &ZeroShotOptions,
) -> Result<Vec<SampleVerdict>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.max_in_flight.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| samples.par_iter().map(|s| judge(s, template, client, opts)).collect()))
}

#[cfg(not(feature = "parallel"))]
fn judge_all(
    samples: &[LabeledSample],
    template: &PromptTemplate,
    client: &dyn ChatClient,
    opts: &ZeroShotOptions,
) -> Result<Vec<SampleVerdict>> {
    Ok(samples.iter().map(|s| judge(s, template, client, opts)).collect())
}

/// Scores already collected verdicts.
pub fn score_verdicts(model: &str, verdicts: Vec<SampleVerdict>, averaging: Averaging) -> ZeroShotReport {
    let mut confusion = ConfusionMatrix::new::<TargetLabel>();
    let mut rejected = vec![0u64; TargetLabel::ALL.len()];
    for v in &verdicts {
        match v.verdict.parsed.label() {
            Some(pred) => confusion.add(v.gold.index(), pred.index()),
            None => rejected[v.gold.index()] += 1,
        }
    }
    let metrics = confusion.metrics_with_rejections(&rejected, averaging);
    let unparseable = rejected.iter().sum::<u64>() as usize;
    ZeroShotReport { model: model.to_string(), metrics, confusion, unparseable, verdicts }
}

/// Labels every sample through `client` and scores the result. Verdicts keep
/// the input order.
pub fn evaluate_zero_shot(
    samples: &[LabeledSample],
    client: &dyn ChatClient,
    template: &PromptTemplate,
    opts: &ZeroShotOptions,
) -> Result<ZeroShotReport> {
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let verdicts = judge_all(samples, template, client, opts)?;
    Ok(score_verdicts(client.model(), verdicts, opts.averaging))
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicUsize, Ordering};

    use super::*;
    use crate::ingest::Provenance;

    fn sample(id: &str, text: &str, label: TargetLabel) -> LabeledSample {
        LabeledSample::new(id, text, label, Provenance::Tracker)
    }

    struct Flaky {
        failures: usize,
        calls: AtomicUsize,
    }

    impl ChatClient for Flaky {
        fn model(&self) -> &str {
            "flaky"
        }

        fn complete(&self, _prompt: &str) -> Result<String> {
            let n = self.calls.fetch_add(1, Ordering::SeqCst);
            if n < self.failures {
                Err(Error::Transport("503".into()))
            } else {
                Ok("None".into())
            }
        }
    }

    fn opts() -> ZeroShotOptions {
        ZeroShotOptions { backoff_ms: 0, max_in_flight: 1, ..Default::default() }
    }

    #[test]
    fn retries_then_succeeds() {
        let data = [sample("a", "text one here", TargetLabel::None)];
        let c = Flaky { failures: 2, calls: AtomicUsize::new(0) };
        let r = evaluate_zero_shot(&data, &c, &PromptTemplate::default(), &opts()).unwrap();
        assert_eq!(r.metrics.accuracy, 1.0);
        assert_eq!(c.calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn exhausted_retries_become_unparseable() {
        let data = [sample("a", "text one here", TargetLabel::None)];
        let c = Flaky { failures: 3, calls: AtomicUsize::new(0) };
        let r = evaluate_zero_shot(&data, &c, &PromptTemplate::default(), &opts()).unwrap();
        assert_eq!(c.calls.load(Ordering::SeqCst), 3);
        assert_eq!(r.unparseable, 1);
        assert_eq!(r.metrics.accuracy, 0.0);
        assert!(r.verdicts[0].error.as_deref().unwrap().contains("503"));
    }

    #[test]
    fn banana_scores_zero() {
        let data = [
            sample("a", "We reach net zero by 2040.", TargetLabel::NetZero),
            sample("b", "Cut emissions 30% by 2030.", TargetLabel::Reduction),
            sample("c", "Revenue grew.", TargetLabel::None),
        ];
        let r = evaluate_zero_shot(&data, &ConstantClient("banana".into()), &PromptTemplate::default(), &opts()).unwrap();
        assert_eq!(r.unparseable, 3);
        assert_eq!(r.metrics, FoldMetrics { accuracy: 0.0, f1: 0.0, precision: 0.0, recall: 0.0 });
        assert!(r.verdicts.iter().all(|v| v.verdict.parsed == Verdict::Unparseable));
    }

    #[test]
    fn empty_dataset_rejected() {
        assert!(matches!(
            evaluate_zero_shot(&[], &ConstantClient("None".into()), &PromptTemplate::default(), &opts()),
            Err(Error::EmptyDataset)
        ));
    }
}
