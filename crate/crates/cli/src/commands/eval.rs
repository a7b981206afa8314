use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use netzero::ambition::{read_claims_tsv, read_gold_tsv, write_curve_tsv};
use netzero::ambition::{AmbitionDimension, AmbitionGold, DimensionRun, EvalMode, EvalResult};
use netzero::ambition::{HeuristicQa, QaBackend, ReplayQa};
use netzero::ingest::read_dataset;
use netzero::llm::{evaluate_zero_shot, PromptTemplate};
use netzero::llm::{CachedClient, ChatClient, GoldEchoClient, HttpChatClient};
use netzero::plot::{LineChart, Series};
use netzero::TargetLabel;
use serde_json::json;

use super::{fmt_opt, set, set_path, Step};
use crate::config::{check_optional, check_paths, parse_thresholds, LlmClientKind, Need, Problem, QaKind, RunConfig};
use crate::run::RunDir;

/// Gold records, claim texts by id, and the Q&A backend.
type Loaded = (Vec<AmbitionGold>, HashMap<String, String>, Box<dyn QaBackend>);

#[derive(Debug, Args)]
pub struct EvalLlmArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Replay cached completions only (`llm.client = "replay"`).
    #[arg(long)]
    offline: bool,
    /// Completion cache directory (`paths.llm_cache`).
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    /// Prompt template file with one `^^^{text}^^^` slot.
    #[arg(long)]
    template: Option<PathBuf>,
}

impl Step for EvalLlmArgs {
    fn apply(&self, config: &mut RunConfig) {
        set_path(&mut config.paths.dataset, &self.dataset);
        set_path(&mut config.paths.llm_cache, &self.cache);
        set_path(&mut config.paths.prompt_template, &self.template);
        set(&mut config.llm.model, &self.model);
        if self.offline {
            config.llm.client = LlmClientKind::Replay;
        }
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        let mut p = check_paths(&config.paths, &[("dataset", Need::File)]);
        p.extend(check_optional(&config.paths, &[("prompt_template", Need::File)]));
        match config.llm.client {
            LlmClientKind::Replay => p.extend(check_paths(&config.paths, &[("llm_cache", Need::Dir)])),
            LlmClientKind::Http => {
                let var = &config.llm.api_key_env;
                if std::env::var(var).map_or(true, |v| v.is_empty()) {
                    p.push(Problem { field: "llm.api_key_env".into(), message: format!("environment variable {var} is not set") });
                }
                if config.paths.llm_cache.is_none() {
                    p.push(Problem { field: "paths.llm_cache".into(), message: "live runs need a cache directory".into() });
                }
            }
            LlmClientKind::GoldEcho => {}
        }
        p
    }

    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let samples = read_dataset::<TargetLabel>(config.paths.dataset.as_deref().expect("checked"))?;
        let template = match &config.paths.prompt_template {
            Some(p) => PromptTemplate::new(std::fs::read_to_string(p)?)?,
            None => PromptTemplate::default(),
        };
        let llm = &config.llm;
        let client: Box<dyn ChatClient> = match llm.client {
            LlmClientKind::Replay => Box::new(CachedClient::replay(config.paths.llm_cache.clone().expect("checked"), llm.model.clone())),
            LlmClientKind::Http => {
                let http = HttpChatClient::from_env(llm.endpoint.as_deref(), &llm.model, &llm.api_key_env)?;
                Box::new(CachedClient::new(config.paths.llm_cache.clone().expect("checked"), http))
            }
            LlmClientKind::GoldEcho => Box::new(GoldEchoClient::new(samples.iter().map(|s| (s.text.as_str(), s.label)))),
        };
        let report = evaluate_zero_shot(&samples, client.as_ref(), &template, &llm.options(config.classifier.averaging))?;
        let verdicts: String = report.verdicts.iter().map(|v| serde_json::to_string(v).expect("serializes") + "\n").collect();
        run.write("verdicts.jsonl", verdicts)?;
        run.write("llm_confusion.tsv", report.confusion.to_table())?;
        let m = &report.metrics;
        let summary = json!({
            "model": report.model,
            "accuracy": m.accuracy,
            "f1": m.f1,
            "precision": m.precision,
            "recall": m.recall,
            "unparseable": report.unparseable,
            "n": report.verdicts.len(),
        });
        run.write_json("llm_metrics.json", &summary)?;
        Ok(summary)
    }
}

/// Flags and loading shared by `ambition-eval` and `curve`.
#[derive(Debug, Args)]
pub struct AmbitionInputs {
    /// Gold values, tab separated (`paths.ambition_gold`).
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Claim texts, tab separated (`paths.ambition_claims`).
    #[arg(long)]
    claims: Option<PathBuf>,
    /// Recorded answers of an external Q&A model (`paths.qa_replay`);
    /// switches the backend to replay.
    #[arg(long)]
    replay: Option<PathBuf>,
}

impl AmbitionInputs {
    fn apply(&self, config: &mut RunConfig) {
        set_path(&mut config.paths.ambition_gold, &self.gold);
        set_path(&mut config.paths.ambition_claims, &self.claims);
        if self.replay.is_some() {
            set_path(&mut config.paths.qa_replay, &self.replay);
            config.ambition.backend = QaKind::Replay;
        }
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        let mut p = check_paths(&config.paths, &[("ambition_gold", Need::File), ("ambition_claims", Need::File)]);
        if config.ambition.backend == QaKind::Replay {
            p.extend(check_paths(&config.paths, &[("qa_replay", Need::File)]));
        }
        p
    }

    fn load(&self, config: &RunConfig) -> Result<Loaded> {
        let golds = read_gold_tsv(config.paths.ambition_gold.as_deref().expect("checked"))?;
        let texts = read_claims_tsv(config.paths.ambition_claims.as_deref().expect("checked"))?;
        let backend: Box<dyn QaBackend> = match config.ambition.backend {
            QaKind::Heuristic => Box::new(HeuristicQa { null_score: config.ambition.null_score }),
            QaKind::Replay => Box::new(ReplayQa::load(config.paths.qa_replay.as_deref().expect("checked"))?),
        };
        Ok((golds, texts, backend))
    }
}

fn dimensions_in(golds: &[AmbitionGold]) -> Vec<AmbitionDimension> {
    AmbitionDimension::ALL.into_iter().filter(|d| golds.iter().any(|g| g.dimension == *d)).collect()
}

#[derive(Debug, Args)]
pub struct AmbitionEvalArgs {
    #[command(flatten)]
    inputs: AmbitionInputs,
    /// Threshold of the CONFIDENCE row (`ambition.confidence`).
    #[arg(long)]
    confidence: Option<f64>,
}

fn result_row(out: &mut String, r: &EvalResult) {
    let _ = writeln!(
        out,
        "{}\t{}\t{}\t{:.6}\t{}\t{}",
        r.dimension.name(),
        r.mode,
        fmt_opt(r.accuracy),
        r.coverage,
        r.retained_ids.len(),
        r.n_total
    );
}

impl Step for AmbitionEvalArgs {
    fn apply(&self, config: &mut RunConfig) {
        self.inputs.apply(config);
        set(&mut config.ambition.confidence, &self.confidence);
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        self.inputs.check(config)
    }

    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let (golds, texts, backend) = self.inputs.load(config)?;
        let mut table = String::from("dimension\tmode\taccuracy\tcoverage\tn_retained\tn_total\n");
        let mut answers = String::new();
        let mut summary = serde_json::Map::new();
        for dim in dimensions_in(&golds) {
            let dr = DimensionRun::new(&golds, &texts, backend.as_ref(), dim)?;
            for item in &dr.items {
                answers.push_str(&serde_json::to_string(&json!({ "dimension": dim, "item": item }))?);
                answers.push('\n');
            }
            let modes = [EvalMode::Raw, EvalMode::Optimal, EvalMode::Confidence(config.ambition.confidence)];
            let results: Vec<EvalResult> = modes.iter().map(|&m| dr.evaluate(m)).collect();
            for r in &results {
                result_row(&mut table, r);
            }
            summary.insert(
                dim.name().to_string(),
                json!({
                    "raw": results[0].accuracy,
                    "optimal": results[1].accuracy,
                    "confidence": results[2].accuracy,
                    "confidence_coverage": results[2].coverage,
                }),
            );
        }
        run.write("ambition_eval.tsv", table)?;
        run.write("answers.jsonl", answers)?;
        Ok(serde_json::Value::Object(summary))
    }
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    inputs: AmbitionInputs,
    /// One dimension, e.g. `red_base_year`; all dimensions in the gold file
    /// otherwise.
    #[arg(long)]
    dimension: Option<String>,
    /// `start:stop:step` or a comma-separated list (`ambition.thresholds`).
    #[arg(long)]
    thresholds: Option<String>,
}

fn curve_chart(dim: AmbitionDimension, curve: &[EvalResult], thresholds: &[f64]) -> LineChart {
    let acc = thresholds.iter().zip(curve).filter_map(|(t, r)| r.accuracy.map(|a| (*t, a))).collect();
    let cov = thresholds.iter().zip(curve).map(|(t, r)| (*t, r.coverage)).collect();
    LineChart {
        title: format!("Accuracy and coverage by confidence threshold, {}", dim.name()),
        x_label: "confidence threshold".into(),
        y_label: "share".into(),
        series: vec![Series::new("accuracy", acc), Series { dashed: true, ..Series::new("coverage", cov) }],
        y_range: Some((0.0, 1.0)),
        integer_x: false,
    }
}

impl Step for CurveArgs {
    fn apply(&self, config: &mut RunConfig) {
        self.inputs.apply(config);
        set(&mut config.ambition.thresholds, &self.thresholds);
    }

    fn check(&self, config: &RunConfig) -> Vec<Problem> {
        let mut p = self.inputs.check(config);
        if let Some(d) = &self.dimension {
            if let Err(e) = d.parse::<AmbitionDimension>() {
                p.push(Problem { field: "--dimension".into(), message: e.to_string() });
            }
        }
        p
    }

    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value> {
        let thresholds = parse_thresholds(&config.ambition.thresholds).map_err(anyhow::Error::msg)?;
        let (golds, texts, backend) = self.inputs.load(config)?;
        let dims = match &self.dimension {
            Some(d) => vec![d.parse::<AmbitionDimension>()?],
            None => dimensions_in(&golds),
        };
        let mut summary = serde_json::Map::new();
        for dim in dims {
            let curve = DimensionRun::new(&golds, &texts, backend.as_ref(), dim)?.curve(&thresholds)?;
            let stem = format!("curve_{}", dim.name().to_lowercase());
            let tsv = run.path(&format!("{stem}.tsv"));
            write_curve_tsv(&tsv, &curve)?;
            run.record(&tsv);
            run.write(&format!("{stem}.svg"), curve_chart(dim, &curve, &thresholds).to_svg())?;
            summary.insert(dim.name().to_string(), json!({ "points": curve.len() }));
        }
        Ok(serde_json::Value::Object(summary))
    }
}
