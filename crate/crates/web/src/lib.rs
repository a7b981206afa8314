//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each exported function takes plain values and returns a JSON string, so
//! the page needs no generated TypeScript types. The same functions are
//! callable from Rust, which is how the tests exercise them.

use std::cell::OnceCell;
use std::collections::HashMap;

use netzero::ambition::{extract, parse_claims_tsv, parse_gold_tsv, AmbitionDimension, AmbitionGold, DimensionRun, EvalMode, HeuristicQa};
use netzero::classifier::{fine_tune, resolve_base, ClassifierConfig, ModelHandle};
use netzero::corpus::{analyze_corpus, timeseries_chart, Aggregation};
use netzero::synth::{climate_dataset, synthetic_corpus, target_dataset, CorpusSpec};
use netzero::{ClimateLabel, TargetLabel};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

const GOLD: &str = include_str!("../../core/data/ambition/gold.tsv");
const CLAIMS: &str = include_str!("../../core/data/ambition/claims.tsv");

fn to_js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

#[derive(Serialize)]
struct Extracted {
    dimension: &'static str,
    question: &'static str,
    answer: String,
    /// Byte offset in the claim.
    start: usize,
    /// The same span in UTF-16 code units, for slicing JavaScript strings.
    span_utf16: [usize; 2],
    confidence: f64,
}

/// Answers all four ambition questions for one claim.
pub fn extract_ambition_json(text: &str, null_score: f64) -> netzero::Result<String> {
    let qa = HeuristicQa { null_score };
    let rows = AmbitionDimension::ALL
        .into_iter()
        .map(|d| {
            let a = extract(&qa, text, d)?;
            let from = text[..a.start].encode_utf16().count();
            let span_utf16 = [from, from + a.answer_text.encode_utf16().count()];
            Ok(Extracted {
                dimension: d.name(),
                question: d.question(),
                answer: a.answer_text,
                start: a.start,
                span_utf16,
                confidence: a.confidence,
            })
        })
        .collect::<netzero::Result<Vec<_>>>()?;
    Ok(serde_json::to_string(&rows).expect("plain data serializes"))
}

#[wasm_bindgen(js_name = extractAmbition)]
pub fn extract_ambition(text: &str, null_score: f64) -> Result<String, JsError> {
    extract_ambition_json(text, null_score).map_err(to_js)
}

thread_local! {
    static RUNS: OnceCell<Vec<DimensionRun>> = const { OnceCell::new() };
}

fn fixture_runs() -> netzero::Result<Vec<DimensionRun>> {
    let golds: Vec<AmbitionGold> = parse_gold_tsv(GOLD.as_bytes())?;
    let texts: HashMap<String, String> = parse_claims_tsv(CLAIMS.as_bytes())?;
    let qa = HeuristicQa::default();
    AmbitionDimension::ALL.into_iter().map(|d| DimensionRun::new(&golds, &texts, &qa, d)).collect()
}

/// Accuracy-coverage curve of the bundled claim set for one dimension, plus
/// the point at `threshold`. Extraction runs once; moving the slider only
/// re-scores.
pub fn curve_json(dimension: &str, threshold: f64, steps: usize) -> netzero::Result<String> {
    let dim: AmbitionDimension = dimension.parse()?;
    if !(0.0..=1.0).contains(&threshold) || steps == 0 {
        return Err(netzero::Error::Input("threshold must lie in [0, 1] and steps must be positive".into()));
    }
    let runs = RUNS.with(|cell| match cell.get() {
        Some(r) => Ok(r.clone()),
        None => {
            let r = fixture_runs()?;
            Ok::<_, netzero::Error>(cell.get_or_init(|| r).clone())
        }
    })?;
    let run = runs.iter().find(|r| r.dimension == dim).expect("every dimension is present");
    let grid: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
    let curve: Vec<_> = run
        .curve(&grid)?
        .into_iter()
        .map(|r| json!({ "threshold": threshold_of(r.mode), "accuracy": r.accuracy, "coverage": r.coverage }))
        .collect();
    let at = run.evaluate(EvalMode::Confidence(threshold));
    let raw = run.evaluate(EvalMode::Raw);
    let optimal = run.evaluate(EvalMode::Optimal);
    Ok(json!({
        "dimension": dim.name(),
        "n": run.items.len(),
        "raw": raw.accuracy,
        "optimal": optimal.accuracy,
        "at": { "threshold": threshold, "accuracy": at.accuracy, "coverage": at.coverage, "retained": at.retained_ids.len() },
        "curve": curve,
    })
    .to_string())
}

fn threshold_of(mode: EvalMode) -> f64 {
    match mode {
        EvalMode::Confidence(t) => t,
        _ => 0.0,
    }
}

#[wasm_bindgen(js_name = accuracyCoverage)]
pub fn accuracy_coverage(dimension: &str, threshold: f64, steps: usize) -> Result<String, JsError> {
    curve_json(dimension, threshold, steps).map_err(to_js)
}

struct Models {
    climate: ModelHandle<ClimateLabel>,
    target: ModelHandle<TargetLabel>,
}

thread_local! {
    static MODELS: OnceCell<Models> = const { OnceCell::new() };
}

fn train_models() -> netzero::Result<Models> {
    let backend = resolve_base("ngram-logreg", None)?;
    let mut config = ClassifierConfig { epochs: 4, num_labels: 2, ..ClassifierConfig::default() };
    let climate = climate_dataset([150, 150], 7);
    let (cv, ct) = climate.split_at(60);
    let climate = fine_tune(ct, cv, &config, backend.as_ref())?;
    config.num_labels = 3;
    let target = target_dataset([80, 80, 120], 8);
    let (tv, tt) = target.split_at(60);
    let target = fine_tune(tt, tv, &config, backend.as_ref())?;
    Ok(Models { climate, target })
}

/// Generates a synthetic transcript corpus whose net-zero rate rises by
/// `slope` per year after 2019, classifies it with two small models trained
/// in the page, and returns the yearly index with an SVG chart.
pub fn trend_json(n_docs: usize, slope: f64, seed: u64, quarter_first: bool) -> netzero::Result<String> {
    if n_docs == 0 || n_docs > 400 || !(0.0..=0.2).contains(&slope) {
        return Err(netzero::Error::Input("documents must be in 1..=400 and slope in [0, 0.2]".into()));
    }
    let spec = CorpusSpec { n_docs, net_zero_slope: slope, ..CorpusSpec::default() };
    let docs = synthetic_corpus(&spec, seed);
    let mode = if quarter_first { Aggregation::QuarterFirst } else { Aggregation::EventMean };
    let analysis = MODELS.with(|cell| {
        if cell.get().is_none() {
            let m = train_models()?;
            let _ = cell.set(m);
        }
        let m = cell.get().expect("just set");
        analyze_corpus(&docs, &m.climate, &m.target, mode)
    })?;
    let truth: Vec<_> = (spec.first_year..=spec.last_year).map(|y| json!({ "year": y, "rate": spec.net_zero_rate(y) })).collect();
    Ok(json!({
        "index": analysis.index,
        "generator_rate": truth,
        "sentences": analysis.records.len(),
        "svg": timeseries_chart(&analysis.index).to_svg(),
    })
    .to_string())
}

#[wasm_bindgen(js_name = trendIndex)]
pub fn trend_index(n_docs: usize, slope: f64, seed: u64, quarter_first: bool) -> Result<String, JsError> {
    trend_json(n_docs, slope, seed, quarter_first).map_err(to_js)
}
