//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Criteria that need the published data, transformer weights or a chat API
//! key only run when the matching environment variables are set:
//!
//! * `NETZERO_DATASET` cleaned three-class dataset (JSONL), criteria 1, 2, 3, 4
//! * `NETZERO_BASE_MODEL` and `NETZERO_MODELS` base model id and local store
//! * `OPENAI_API_KEY` (optionally `NETZERO_LLM_CACHE`), criterion 4
//! * `NETZERO_AMBITION_GOLD`, `NETZERO_AMBITION_CLAIMS` and optionally
//!   `NETZERO_QA_REPLAY`, criterion 5
//! * `NETZERO_TRACKER`, `NETZERO_NON_TARGET` and optionally `NETZERO_MAPPING`,
//!   criterion 8
//!
//! Without them those lines read GATED and the desk-scale substitutes run.

mod common;

use std::collections::HashMap;
use std::env;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use netzero::ambition::{
    answer_matches, read_claims_tsv, read_gold_tsv, threshold_grid, AmbitionDimension, AmbitionGold, DimensionRun, EvalMode, HeuristicQa,
    QaBackend, ReplayQa,
};
use netzero::classifier::stub::GoldEchoBackend;
use netzero::classifier::{cross_validate, fine_tune, grid_search, resolve_base, Backend, ClassifierConfig, Grid, ModelHandle};
use netzero::corpus::{
    analyze_corpus, emit_timeseries, read_corpus, records_tsv, yearly_index, Aggregation, CorpusAnalysis, SentenceClassifier,
};
use netzero::hitl::{apply_corrections, replay_reverse, Correction, ReviewItem};
use netzero::ingest::{
    clean_and_filter, label_counts, raw_samples, read_dataset, stratified_kfold_labels, stratified_subsample, to_binary, ColumnMap,
    DatasetStats, LabeledSample, Provenance, SubLabelMap, DEFAULT_MIN_WORDS,
};
use netzero::llm::{canonical_answer, evaluate_zero_shot, CachedClient, ConstantClient, GoldEchoClient, PromptTemplate, ZeroShotOptions};
use netzero::seed::{derive_seed, rng};
use netzero::synth::{self, CorpusSpec};
use netzero::{ClassLabel, ClimateLabel, TargetLabel};
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::seq::SliceRandom;

/// Published label counts in label order (net zero, reduction, none).
const PUBLISHED_COUNTS: [usize; 3] = [990, 1005, 1522];

enum Status {
    Pass,
    Fail,
    Gated,
}

struct Outcome {
    status: Status,
    detail: String,
}

type Check<T = String> = Result<T, String>;

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { status: Status::Pass, detail: detail.into() }
}

fn gated(detail: impl Into<String>) -> Outcome {
    Outcome { status: Status::Gated, detail: detail.into() }
}

fn from_check(c: Check) -> Outcome {
    match c {
        Ok(d) => pass(d),
        Err(d) => Outcome { status: Status::Fail, detail: d },
    }
}

trait Ctx<T> {
    fn ctx(self, what: &str) -> Check<T>;
}

impl<T, E: std::fmt::Display> Ctx<T> for Result<T, E> {
    fn ctx(self, what: &str) -> Check<T> {
        self.map_err(|e| format!("{what}: {e}"))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check<()> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn env_path(name: &str) -> Option<PathBuf> {
    env::var_os(name).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

/// Full-scale backend and the hyperparameters used for the published runs.
fn full_scale_backend(num_labels: usize) -> Check<(Box<dyn Backend>, ClassifierConfig)> {
    let base = env::var("NETZERO_BASE_MODEL").unwrap_or_else(|_| "climatebert/distilroberta-base-climate-f".into());
    let store = env_path("NETZERO_MODELS");
    let backend = resolve_base(&base, store.as_deref()).ctx("base model")?;
    Ok((backend, ClassifierConfig { base_model_id: base, num_labels, ..ClassifierConfig::default() }))
}

/// The published dataset, recognised by its class counts so that a
/// stand-in file cannot satisfy the full-scale criteria.
fn published_dataset() -> Option<Check<Vec<LabeledSample>>> {
    env_path("NETZERO_DATASET").map(|p| {
        let data: Vec<LabeledSample> = read_dataset(&p).ctx("NETZERO_DATASET")?;
        let counts = label_counts(&data);
        let got: Vec<usize> = TargetLabel::ALL.iter().map(|l| counts.get(l).copied().unwrap_or(0)).collect();
        ensure(got == PUBLISHED_COUNTS, || format!("NETZERO_DATASET has class counts {got:?}, not the published {PUBLISHED_COUNTS:?}"))?;
        Ok(data)
    })
}

// 1. Three-class cross-validation on the published dataset.
fn criterion_1() -> Outcome {
    let Some(data) = published_dataset() else {
        return gated("needs NETZERO_DATASET and the climate-domain base model");
    };
    from_check((|| {
        let data = data?;
        let (backend, config) = full_scale_backend(3)?;
        let t = Instant::now();
        let r = cross_validate(&data, &config, 5, backend.as_ref()).ctx("cross-validation")?;
        let (acc, f1) = (r.summary.accuracy.mean, r.summary.f1.mean);
        let detail = format!("{}: accuracy {acc:.4}, macro-F1 {f1:.4} in {}", config.base_model_id, secs(t.elapsed()));
        ensure(acc >= 0.950 && f1 >= 0.945, || format!("{detail}; need accuracy >= 0.950 and macro-F1 >= 0.945"))?;
        ensure(t.elapsed() <= Duration::from_secs(4 * 3600), || format!("{detail}; over the 4 h budget"))?;
        Ok(detail)
    })())
}

// 2. Binary reduction model.
fn criterion_2() -> Outcome {
    let Some(data) = published_dataset() else {
        return gated("needs NETZERO_DATASET and the climate-domain base model");
    };
    from_check((|| {
        let data = to_binary(&data?);
        let (backend, config) = full_scale_backend(2)?;
        let t = Instant::now();
        let r = cross_validate(&data, &config, 5, backend.as_ref()).ctx("cross-validation")?;
        let acc = r.summary.accuracy.mean;
        let detail = format!("{}: binary accuracy {acc:.4} in {}", config.base_model_id, secs(t.elapsed()));
        ensure(acc >= 0.975, || format!("{detail}; need >= 0.975"))?;
        Ok(detail)
    })())
}

// 3. Grid harness: 12 cells on a 10% stratified subsample, plus the
// full-data spot check when the dataset is available.
fn criterion_3() -> Outcome {
    from_check((|| {
        let data = synth::target_dataset(PUBLISHED_COUNTS, 31);
        let labels: Vec<TargetLabel> = data.iter().map(|s| s.label).collect();
        let picked = stratified_subsample(&labels, 0.1, derive_seed(42, 100));
        let sub: Vec<LabeledSample> = picked.iter().map(|&i| data[i].clone()).collect();
        let bases: Vec<String> = ["ngram-logreg", "unigram-logreg", "trigram-logreg"].map(String::from).to_vec();
        let t = Instant::now();
        let report =
            grid_search(&sub, &Grid::default(), &bases, &ClassifierConfig::default(), 5, &|b| resolve_base(b, None)).ctx("grid")?;
        let elapsed = t.elapsed();
        ensure(report.rows.len() == 36, || format!("{} rows, expected 12 cells x 3 bases", report.rows.len()))?;
        let complete = report.rows.iter().all(|r| r.accuracy.mean.is_finite() && r.f1.mean.is_finite() && r.accuracy.std.is_finite());
        ensure(complete, || "grid table has missing values".into())?;
        let table = report.to_table();
        ensure(table.lines().count() == 37, || "table does not have one line per row".into())?;
        ensure(elapsed <= Duration::from_secs(3600), || format!("grid took {}", secs(elapsed)))?;
        let mut detail = format!("36-row grid on a {}-sample subsample in {}", sub.len(), secs(elapsed));

        match published_dataset() {
            None => detail.push_str("; full-data spot check GATED (NETZERO_DATASET)"),
            Some(full) => {
                let full = full?;
                let (backend, config) = full_scale_backend(3)?;
                let config = ClassifierConfig { learning_rate: 3e-5, epochs: 5, batch_size: 32, ..config };
                let acc = cross_validate(&full, &config, 5, backend.as_ref()).ctx("spot check")?.summary.accuracy.mean;
                ensure((acc - 0.971).abs() <= 0.02, || format!("spot-check accuracy {acc:.4} not within 0.02 of 0.971"))?;
                detail.push_str(&format!("; spot check accuracy {acc:.4}"));
            }
        }
        Ok(detail)
    })())
}

fn quiet_opts() -> ZeroShotOptions {
    ZeroShotOptions { backoff_ms: 0, ..Default::default() }
}

// 4. Zero-shot baseline: replay and mock properties, live run when keyed.
fn criterion_4() -> Outcome {
    from_check((|| {
        let fx = data_dir().join("llm_fixture");
        let data: Vec<LabeledSample> = read_dataset(&fx.join("dataset.jsonl")).ctx("fixture")?;
        let client = CachedClient::replay(fx.join("cache"), "gpt-3.5-turbo");
        let r = evaluate_zero_shot(&data, &client, &PromptTemplate::default(), &quiet_opts()).ctx("replay")?;
        // reference numbers come from a separate scorer over the cached responses
        let m = &r.metrics;
        let replay_ok = r.verdicts.iter().all(|v| v.error.is_none())
            && r.unparseable == 1
            && (m.accuracy - 8.0 / 12.0).abs() < 1e-12
            && (m.f1 - 0.7023809523809524).abs() < 1e-12
            && (m.precision - 0.75).abs() < 1e-12;
        ensure(replay_ok, || format!("replay metrics {m:?}, unparseable {}", r.unparseable))?;

        let synth = synth::target_dataset(PUBLISHED_COUNTS, 4);
        let echo = GoldEchoClient::new(synth.iter().map(|s| (s.text.as_str(), s.label)));
        let e = evaluate_zero_shot(&synth, &echo, &PromptTemplate::default(), &quiet_opts()).ctx("gold echo")?;
        ensure(e.metrics.accuracy == 1.0 && e.confusion.is_diagonal(), || format!("gold-echo accuracy {}", e.metrics.accuracy))?;

        let counts = label_counts(&synth);
        for &label in TargetLabel::ALL {
            let c = evaluate_zero_shot(&synth, &ConstantClient(canonical_answer(label).into()), &PromptTemplate::default(), &quiet_opts())
                .ctx("constant")?;
            let prevalence = counts[&label] as f64 / synth.len() as f64;
            ensure(c.metrics.accuracy == prevalence, || {
                format!("constant {label}: accuracy {} vs prevalence {prevalence}", c.metrics.accuracy)
            })?;
        }
        let mut detail = String::from("replay fixture, gold-echo 1.0 and constant = prevalence");

        #[cfg(feature = "http")]
        match (published_dataset(), env::var("OPENAI_API_KEY").ok().filter(|k| !k.is_empty())) {
            (Some(full), Some(_)) => {
                let full = full?;
                let http = netzero::llm::HttpChatClient::from_env(None, "gpt-3.5-turbo", "OPENAI_API_KEY").ctx("client")?;
                let cache = env_path("NETZERO_LLM_CACHE").unwrap_or_else(|| env::temp_dir().join("netzero-llm-cache"));
                let live = CachedClient::new(cache, http);
                let r = evaluate_zero_shot(&full, &live, &PromptTemplate::default(), &ZeroShotOptions::default()).ctx("live")?;
                let acc = r.metrics.accuracy;
                ensure((acc - 0.938).abs() <= 0.03, || format!("live accuracy {acc:.4} not within 0.03 of 0.938"))?;
                detail.push_str(&format!("; live accuracy {acc:.4}"));
            }
            _ => detail.push_str("; live run GATED (NETZERO_DATASET, OPENAI_API_KEY)"),
        }
        #[cfg(not(feature = "http"))]
        detail.push_str("; live run GATED (built without http)");
        Ok(detail)
    })())
}

fn ambition_fixture() -> Check<(Vec<AmbitionGold>, HashMap<String, String>)> {
    let dir = data_dir().join("ambition");
    Ok((read_gold_tsv(&dir.join("gold.tsv")).ctx("gold")?, read_claims_tsv(&dir.join("claims.tsv")).ctx("claims")?))
}

// 5. Ambition extraction.
fn criterion_5() -> Outcome {
    from_check((|| {
        let mut r = rng(2024);
        let mut checks = 0usize;
        for _ in 0..1000 {
            let claim = synth::ambition_claim(&mut r);
            let mut probes: Vec<f64> = claim.values.iter().map(|v| v.1).collect();
            probes.extend(common::oracle::tokens(&claim.text).iter().flat_map(|t| [t.value, t.value + 1.0]));
            for dim in AmbitionDimension::ALL {
                for &p in &probes {
                    let expected = common::oracle::contains(&claim.text, p, dim.is_year());
                    ensure(answer_matches(&claim.text, p, dim) == expected, || format!("{dim} {p} in {:?}", claim.text))?;
                    checks += 1;
                }
            }
        }
        let (golds, texts) = ambition_fixture()?;
        ensure(texts.len() >= 50, || format!("fixture has {} claims", texts.len()))?;
        let run = DimensionRun::new(&golds, &texts, &HeuristicQa::default(), AmbitionDimension::NzTargetYear).ctx("extraction")?;
        let raw = run.evaluate(EvalMode::Raw).accuracy.unwrap_or(0.0);
        ensure(raw >= 0.90, || format!("fixture net-zero year RAW {raw:.3} < 0.90"))?;
        let mut detail = format!("oracle agreement on {checks} checks, fixture ({} claims) net-zero year RAW {raw:.3}", texts.len());

        match (env_path("NETZERO_AMBITION_GOLD"), env_path("NETZERO_AMBITION_CLAIMS")) {
            (Some(g), Some(c)) => {
                let golds = read_gold_tsv(&g).ctx("gold")?;
                let texts = read_claims_tsv(&c).ctx("claims")?;
                let backend: Box<dyn QaBackend> = match env_path("NETZERO_QA_REPLAY") {
                    Some(p) => Box::new(ReplayQa::load(&p).ctx("replay")?),
                    None => Box::new(HeuristicQa::default()),
                };
                let nz = DimensionRun::new(&golds, &texts, backend.as_ref(), AmbitionDimension::NzTargetYear).ctx("nz")?;
                let nz_raw = nz.evaluate(EvalMode::Raw).accuracy.unwrap_or(0.0);
                let base = DimensionRun::new(&golds, &texts, backend.as_ref(), AmbitionDimension::RedBaseYear).ctx("base")?;
                let b_raw = base.evaluate(EvalMode::Raw).accuracy.unwrap_or(0.0);
                let b_conf = base.evaluate(EvalMode::Confidence(0.3));
                let ok = nz_raw >= 0.92 && b_conf.accuracy.is_some_and(|a| a > b_raw) && (0.4..=0.8).contains(&b_conf.coverage);
                let msg = format!(
                    "original set: nz RAW {nz_raw:.3}, base RAW {b_raw:.3}, CONFIDENCE(0.3) {:?} at coverage {:.2}",
                    b_conf.accuracy, b_conf.coverage
                );
                ensure(ok, || msg.clone())?;
                detail.push_str(&format!("; {msg}"));
            }
            _ => detail.push_str("; original subset GATED (NETZERO_AMBITION_GOLD, NETZERO_AMBITION_CLAIMS)"),
        }
        Ok(detail)
    })())
}

fn curve_checks(runs: &[DimensionRun], grid: &[f64]) -> Check<()> {
    for run in runs {
        let curve = run.curve(grid).ctx("curve")?;
        ensure(curve.len() == 21, || format!("{} points", curve.len()))?;
        ensure(curve.windows(2).all(|w| w[1].coverage <= w[0].coverage), || format!("{} coverage not monotone", run.dimension))?;
        let raw = run.evaluate(EvalMode::Raw);
        let zero = &curve[0];
        let same = zero.retained_ids == raw.retained_ids && zero.accuracy == raw.accuracy && zero.coverage == raw.coverage;
        ensure(same, || format!("{} CONFIDENCE(0) differs from RAW", run.dimension))?;
    }
    Ok(())
}

// 6. Accuracy-coverage curve properties.
fn criterion_6() -> Outcome {
    from_check((|| {
        let grid = threshold_grid(0.0, 1.0, 0.05).ctx("grid")?;
        let qa = HeuristicQa::default();
        let (golds, texts) = ambition_fixture()?;
        let runs = AmbitionDimension::ALL
            .into_iter()
            .map(|d| DimensionRun::new(&golds, &texts, &qa, d))
            .collect::<Result<Vec<_>, _>>()
            .ctx("fixture")?;
        curve_checks(&runs, &grid)?;

        // same properties on synthetic claims with a wider confidence spread
        let mut r = rng(6);
        let mut texts = HashMap::new();
        let mut golds = Vec::new();
        for i in 0..400 {
            let claim = synth::ambition_claim(&mut r);
            let id = format!("c{i:04}");
            for (dimension, gold_value) in claim.values {
                golds.push(AmbitionGold { sample_id: id.clone(), dimension, gold_value });
            }
            texts.insert(id, claim.text);
        }
        let runs = AmbitionDimension::ALL
            .into_iter()
            .map(|d| DimensionRun::new(&golds, &texts, &qa, d))
            .collect::<Result<Vec<_>, _>>()
            .ctx("synthetic")?;
        curve_checks(&runs, &grid)?;
        Ok("21-point curves monotone and CONFIDENCE(0) == RAW for all four dimensions, fixture and 400 synthetic claims".into())
    })())
}

fn corpus_models() -> Check<(ModelHandle<ClimateLabel>, ModelHandle<TargetLabel>)> {
    let backend = resolve_base("ngram-logreg", None).ctx("backend")?;
    let climate = synth::climate_dataset([300, 300], 5);
    let (ct, cv) = climate.split_at(500);
    let c =
        fine_tune(ct, cv, &ClassifierConfig { num_labels: 2, epochs: 5, ..Default::default() }, backend.as_ref()).ctx("climate model")?;
    let target = synth::target_dataset([150, 150, 150], 6);
    let (tt, tv) = target.split_at(380);
    let t = fine_tune(tt, tv, &ClassifierConfig { epochs: 5, ..Default::default() }, backend.as_ref()).ctx("target model")?;
    Ok((c, t))
}

/// Trains, analyzes and writes every artifact; returns the analysis and the
/// bytes of all written files.
fn corpus_run(spec: &CorpusSpec, seed: u64, dir: &Path) -> Check<(CorpusAnalysis, Vec<Vec<u8>>)> {
    let docs = synth::synthetic_corpus(spec, seed);
    let (climate, target) = corpus_models()?;
    let a = analyze_corpus(&docs, &climate, &target, Aggregation::EventMean).ctx("analysis")?;
    fs::write(dir.join("records.tsv"), records_tsv(&a.records)).ctx("write")?;
    let written = emit_timeseries(&a.index, &dir.join("timeseries.tsv"), true).ctx("emit")?;
    let mut bytes = vec![fs::read(dir.join("records.tsv")).ctx("read")?];
    for p in written {
        bytes.push(fs::read(p).ctx("read")?);
    }
    Ok((a, bytes))
}

/// Keyword rules for the hand-computed fixture.
struct Keywords;

impl SentenceClassifier<ClimateLabel> for Keywords {
    fn classify(&self, texts: &[&str]) -> netzero::Result<Vec<ClimateLabel>> {
        Ok(texts
            .iter()
            .map(|t| {
                let t = t.to_lowercase();
                if ["emission", "climate", "net zero"].iter().any(|k| t.contains(k)) {
                    ClimateLabel::Climate
                } else {
                    ClimateLabel::NotClimate
                }
            })
            .collect())
    }
}

impl SentenceClassifier<TargetLabel> for Keywords {
    fn classify(&self, texts: &[&str]) -> netzero::Result<Vec<TargetLabel>> {
        Ok(texts
            .iter()
            .map(|t| match () {
                _ if t.contains("net zero") => TargetLabel::NetZero,
                _ if t.contains("percent by") => TargetLabel::Reduction,
                _ => TargetLabel::None,
            })
            .collect())
    }
}

// 7. Corpus pipeline on a 30-document synthetic corpus.
fn criterion_7() -> Outcome {
    from_check((|| {
        let t = Instant::now();
        let spec = CorpusSpec::default();
        ensure(spec.n_docs == 30 && spec.trend_start == 2019, || "unexpected corpus spec".into())?;
        let (d1, d2) = (tempfile::tempdir().ctx("tmp")?, tempfile::tempdir().ctx("tmp")?);
        let (a, bytes) = corpus_run(&spec, 77, d1.path())?;

        ensure(a.records.iter().all(|r| r.target == TargetLabel::None || r.is_climate), || "gating invariant violated".into())?;

        for s in &a.shares {
            let recs: Vec<_> = a.records.iter().filter(|r| r.doc_id == s.doc_id).collect();
            let frac = |l: TargetLabel| recs.iter().filter(|r| r.target == l).count() as f64 / recs.len() as f64;
            let ok = s.n_sentences == recs.len()
                && (s.share_net_zero - frac(TargetLabel::NetZero)).abs() < 1e-12
                && (s.share_reduction - frac(TargetLabel::Reduction)).abs() < 1e-12;
            ensure(ok, || format!("share of {} disagrees with counting", s.doc_id))?;
        }
        // hand-computed shares on the three-document fixture
        let toy = read_corpus(&data_dir().join("corpus_fixture")).ctx("fixture")?;
        let ta = analyze_corpus(&toy, &Keywords, &Keywords, Aggregation::EventMean).ctx("fixture analysis")?;
        let hand = [(1.0 / 5.0, 1.0 / 5.0), (0.0, 1.0 / 4.0), (2.0 / 6.0, 1.0 / 6.0)];
        let toy_ok = ta.shares.len() == 3
            && ta
                .shares
                .iter()
                .zip(hand)
                .all(|(s, (nz, red))| (s.share_net_zero - nz).abs() < 1e-12 && (s.share_reduction - red).abs() < 1e-12);
        ensure(toy_ok, || "fixture shares differ from the hand computation".into())?;

        let mut r = rng(9);
        for _ in 0..20 {
            let mut shuffled = a.shares.clone();
            shuffled.shuffle(&mut r);
            for mode in [Aggregation::EventMean, Aggregation::QuarterFirst] {
                ensure(yearly_index(&shuffled, mode) == yearly_index(&a.shares, mode), || format!("{mode:?} index depends on order"))?;
            }
        }

        let nz = |pred: &dyn Fn(i32) -> bool| a.index.iter().filter(|i| pred(i.year)).map(|i| i.mean_share_net_zero).collect::<Vec<_>>();
        let (pre, post) = (nz(&|y| y <= 2018), nz(&|y| y >= 2020));
        let pre_max = pre.iter().copied().fold(0.0, f64::max);
        let post_min = post.iter().copied().fold(1.0, f64::min);
        ensure(!pre.is_empty() && !post.is_empty() && post_min > pre_max, || format!("no trend: pre {pre:?} post {post:?}"))?;

        let (_, again) = corpus_run(&spec, 77, d2.path())?;
        ensure(bytes == again, || "second run differs byte-wise".into())?;
        let elapsed = t.elapsed();
        ensure(elapsed <= Duration::from_secs(300), || format!("took {}", secs(elapsed)))?;
        Ok(format!(
            "{} sentences; gating, shares, permutation invariance, trend (pre max {pre_max:.4} < post min {post_min:.4}) and byte-identical rerun in {}",
            a.records.len(),
            secs(elapsed)
        ))
    })())
}

fn stats_match(ours: &DatasetStats<TargetLabel>, paper: [f64; 7]) -> bool {
    let [count, mean, std, min, max, p25, p75] = paper;
    ours.count as f64 == count
        && (ours.mean_len - mean).abs() <= 0.05 + 1e-9
        && (ours.std_len - std).abs() <= 0.05 + 1e-9
        && ours.min_len as f64 == min
        && ours.max_len as f64 == max
        && (ours.p25 - p25).abs() <= 0.5
        && (ours.p75 - p75).abs() <= 0.5
}

// 8. Data layer on the published tracker export.
fn criterion_8() -> Outcome {
    let (Some(tracker), Some(non_target)) = (env_path("NETZERO_TRACKER"), env::var_os("NETZERO_NON_TARGET").filter(|v| !v.is_empty()))
    else {
        return gated("needs NETZERO_TRACKER and NETZERO_NON_TARGET (published export and non-target sources)");
    };
    from_check((|| {
        let map = match env_path("NETZERO_MAPPING") {
            Some(p) => SubLabelMap::load(&p).ctx("mapping")?,
            None => SubLabelMap::default(),
        };
        let claims = netzero::ingest::tracker::read_claims(&tracker, &ColumnMap::default()).ctx("tracker")?;
        let mut nt = Vec::new();
        for p in env::split_paths(&non_target) {
            nt.extend(netzero::ingest::tracker::read_non_target(&p, ',').ctx("non-target")?);
        }
        let raw = raw_samples(&claims, &nt, &map).ctx("raw samples")?;
        let (samples, report) = clean_and_filter(raw, DEFAULT_MIN_WORDS).ctx("cleaning")?;
        let counts = label_counts(&samples);
        let got: Vec<usize> = TargetLabel::ALL.iter().map(|l| counts.get(l).copied().unwrap_or(0)).collect();
        ensure(got == PUBLISHED_COUNTS && samples.len() == 3517, || format!("counts {got:?}, total {}", samples.len()))?;
        ensure(stats_match(&report.before, [3614.0, 38.5, 59.0, 1.0, 1057.0, 16.0, 40.0]), || format!("before stats {:?}", report.before))?;
        ensure(stats_match(&report.after, [3517.0, 39.5, 59.5, 5.0, 1057.0, 17.0, 40.0]), || format!("after stats {:?}", report.after))?;
        let kappa = report.agreement.as_ref().map(|a| a.cohens_kappa).ok_or("no dual-label columns")?;
        ensure((kappa - 0.931).abs() <= 0.001, || format!("kappa {kappa:.4}"))?;
        Ok(format!("counts {got:?}, length stats match, kappa {kappa:.4}"))
    })())
}

fn review_item(id: &str, round: u32, correction: Option<Correction>) -> ReviewItem {
    ReviewItem {
        sample_id: id.into(),
        text: String::new(),
        gold_label: None,
        predicted_label: TargetLabel::None,
        fold: None,
        round,
        correction,
        reviewer_note: None,
    }
}

fn small_dataset(n: usize) -> Vec<LabeledSample> {
    (0..n)
        .map(|i| LabeledSample::new(format!("s{i:03}"), format!("text {i}"), TargetLabel::from_index(i % 3).unwrap(), Provenance::Tracker))
        .collect()
}

fn rounds_strategy(n: usize) -> impl Strategy<Value = Vec<Vec<(usize, Option<Correction>)>>> {
    let correction = prop_oneof![
        3 => (0usize..3).prop_map(|i| Some(Correction::Relabel(TargetLabel::from_index(i).unwrap()))),
        1 => Just(Some(Correction::Remove)),
        1 => Just(None),
    ];
    proptest::collection::vec(proptest::collection::btree_map(0..n, correction, 0..n).prop_map(|m| m.into_iter().collect()), 1..=4)
}

fn review_round(round: &[(usize, Option<Correction>)], r: usize) -> Vec<ReviewItem> {
    round.iter().map(|(i, c)| review_item(&format!("s{i:03}"), r as u32 + 1, *c)).collect()
}

// 9. Harness self-checks.
fn criterion_9() -> Outcome {
    from_check((|| {
        let data = synth::target_dataset(PUBLISHED_COUNTS, 9);
        let r = cross_validate(&data, &ClassifierConfig::default(), 5, &GoldEchoBackend).ctx("gold-echo")?;
        let s = &r.summary;
        let perfect = [s.accuracy.mean, s.f1.mean, s.precision.mean, s.recall.mean].iter().all(|&v| v == 1.0)
            && r.per_fold.iter().all(|f| f.accuracy == 1.0 && f.f1 == 1.0);
        ensure(perfect && r.confusion.is_diagonal(), || format!("gold-echo summary {s:?}"))?;

        // published per-fold validation counts, in label order (net zero, reduction, none)
        let published_folds = [[198, 201, 305], [198, 201, 305], [198, 201, 304], [198, 201, 304], [198, 201, 304]];
        let within = |folds: &[Vec<usize>]| {
            let mut got: Vec<Vec<usize>> = folds.to_vec();
            got.sort_by(|a, b| b.cmp(a));
            got.iter().zip(published_folds).all(|(g, t)| g.iter().zip(t).all(|(&a, b)| a.abs_diff(b) <= 1))
        };
        ensure(within(&r.fold_label_counts), || format!("fold counts {:?}", r.fold_label_counts))?;
        let labels: Vec<TargetLabel> = data.iter().map(|s| s.label).collect();
        for seed in 0..20 {
            let splits = stratified_kfold_labels(&labels, 5, seed).ctx("split")?;
            let folds: Vec<Vec<usize>> = splits
                .iter()
                .map(|s| TargetLabel::ALL.iter().map(|l| s.val.iter().filter(|&&i| labels[i] == *l).count()).collect())
                .collect();
            ensure(within(&folds), || format!("seed {seed}: fold counts {folds:?}"))?;
        }

        let mut runner = TestRunner::new(PropConfig { cases: 256, failure_persistence: None, ..PropConfig::default() });
        runner
            .run(&rounds_strategy(15), |rs| {
                let original = small_dataset(15);
                let (mut samples, mut exclusions) = (original.clone(), Vec::new());
                for (r, round) in rs.iter().enumerate() {
                    let review = review_round(round, r);
                    let once = apply_corrections(samples, exclusions, &review).unwrap();
                    let twice = apply_corrections(once.samples.clone(), once.exclusions.clone(), &review).unwrap();
                    prop_assert_eq!(&twice.samples, &once.samples);
                    prop_assert_eq!(&twice.exclusions, &once.exclusions);
                    prop_assert_eq!(twice.relabeled + twice.removed, 0);
                    samples = once.samples;
                    exclusions = once.exclusions;
                }
                prop_assert_eq!(replay_reverse(&samples).unwrap(), original);
                Ok(())
            })
            .map_err(|e| format!("hitl property: {e}"))?;
        Ok("gold-echo all 1.0 and diagonal, folds within 1 of the published fold counts for 21 splits, 256 idempotence/reversal cases"
            .into())
    })())
}

fn main() -> ExitCode {
    type Criterion = (u8, &'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        (1, "classification reproduction", criterion_1),
        (2, "binary reduction model", criterion_2),
        (3, "grid harness", criterion_3),
        (4, "LLM baseline", criterion_4),
        (5, "ambition extraction", criterion_5),
        (6, "curve properties", criterion_6),
        (7, "corpus pipeline", criterion_7),
        (8, "data layer", criterion_8),
        (9, "harness self-checks", criterion_9),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
            Outcome { status: Status::Fail, detail: format!("panicked: {msg}") }
        });
        let tag = match outcome.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::Gated => "GATED",
        };
        println!("acceptance {n} {name}: {tag} - {}", outcome.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
