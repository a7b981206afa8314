//! Run configuration: one TOML file, `NETZERO__SECTION__KEY` environment
//! overrides, then command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::Context;
use netzero::classifier::{Averaging, ClassifierConfig, Grid};
use netzero::corpus::Aggregation;
use netzero::ingest::ColumnMap;
use netzero::llm::ZeroShotOptions;
use serde::{Deserialize, Serialize};

pub const ENV_PREFIX: &str = "NETZERO__";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub k: usize,
    pub paths: Paths,
    pub ingest: IngestSection,
    pub classifier: ClassifierConfig,
    pub grid: GridSection,
    pub llm: LlmSection,
    pub ambition: AmbitionSection,
    pub corpus: CorpusSection,
    pub hitl: HitlSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            k: 5,
            paths: Paths::default(),
            ingest: IngestSection::default(),
            classifier: ClassifierConfig::default(),
            grid: GridSection::default(),
            llm: LlmSection::default(),
            ambition: AmbitionSection::default(),
            corpus: CorpusSection::default(),
            hitl: HitlSection::default(),
        }
    }
}

/// Every file or directory a command may read. Relative paths resolve
/// against the working directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub outputs: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub claims: Option<PathBuf>,
    pub non_target: Vec<PathBuf>,
    pub mapping: Option<PathBuf>,
    /// Store of base model descriptors (`<id>/base.toml`).
    pub models: Option<PathBuf>,
    pub llm_cache: Option<PathBuf>,
    pub prompt_template: Option<PathBuf>,
    pub ambition_gold: Option<PathBuf>,
    pub ambition_claims: Option<PathBuf>,
    pub qa_replay: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub climate_model: Option<PathBuf>,
    pub target_model: Option<PathBuf>,
    pub records: Option<PathBuf>,
    pub cv_report: Option<PathBuf>,
    pub review: Option<PathBuf>,
    pub exclusions: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestSection {
    pub min_words: usize,
    pub non_target_delimiter: char,
    pub columns: ColumnMap,
}

impl Default for IngestSection {
    fn default() -> Self {
        IngestSection { min_words: netzero::ingest::DEFAULT_MIN_WORDS, non_target_delimiter: ',', columns: ColumnMap::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub learning_rates: Vec<f64>,
    pub epochs: Vec<usize>,
    pub batch_sizes: Vec<usize>,
    /// Base models to sweep; empty means `classifier.base_model_id`.
    pub bases: Vec<String>,
    /// Stratified fraction of the dataset to run on.
    pub subsample: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        let g = Grid::default();
        GridSection { learning_rates: g.learning_rates, epochs: g.epochs, batch_sizes: g.batch_sizes, bases: Vec::new(), subsample: 1.0 }
    }
}

impl GridSection {
    pub fn grid(&self) -> Grid {
        Grid { learning_rates: self.learning_rates.clone(), epochs: self.epochs.clone(), batch_sizes: self.batch_sizes.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LlmClientKind {
    /// Live chat-completion endpoint, cached on disk.
    Http,
    /// Cached completions only; a miss is an error.
    Replay,
    /// Answers with the gold label. For harness checks.
    GoldEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmSection {
    pub client: LlmClientKind,
    pub model: String,
    pub endpoint: Option<String>,
    /// Name of the environment variable holding the API key. The key itself
    /// never appears in a config file.
    pub api_key_env: String,
    pub max_in_flight: usize,
    pub attempts: u32,
    pub backoff_ms: u64,
}

impl Default for LlmSection {
    fn default() -> Self {
        let d = ZeroShotOptions::default();
        LlmSection {
            client: LlmClientKind::Http,
            model: "gpt-3.5-turbo".into(),
            endpoint: None,
            api_key_env: "OPENAI_API_KEY".into(),
            max_in_flight: d.max_in_flight,
            attempts: d.attempts,
            backoff_ms: d.backoff_ms,
        }
    }
}

impl LlmSection {
    /// Scoring follows `classifier.averaging` so both baselines are
    /// comparable.
    pub fn options(&self, averaging: Averaging) -> ZeroShotOptions {
        ZeroShotOptions { max_in_flight: self.max_in_flight, attempts: self.attempts, backoff_ms: self.backoff_ms, averaging }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QaKind {
    Heuristic,
    Replay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmbitionSection {
    pub backend: QaKind,
    pub null_score: f64,
    /// Threshold for the single CONFIDENCE row of `ambition-eval`.
    pub confidence: f64,
    /// `start:stop:step` or a comma-separated list.
    pub thresholds: String,
}

impl Default for AmbitionSection {
    fn default() -> Self {
        AmbitionSection { backend: QaKind::Heuristic, null_score: 0.5, confidence: 0.3, thresholds: "0:1:0.05".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub aggregation: Aggregation,
    pub plot: bool,
    pub include_targets: bool,
    pub handcheck_random: usize,
}

impl Default for CorpusSection {
    fn default() -> Self {
        CorpusSection { aggregation: Aggregation::EventMean, plot: true, include_targets: true, handcheck_random: 237 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HitlSection {
    pub round: u32,
}

/// A config problem tied to one field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Problem {
    pub field: String,
    pub message: String,
}

/// Everything wrong with a configuration, reported together.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigProblems(pub Vec<Problem>);

impl fmt::Display for ConfigProblems {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| format!("{}: {}", p.field, p.message)).collect();
        write!(f, "invalid configuration: {}", parts.join("; "))
    }
}

impl std::error::Error for ConfigProblems {}

impl ConfigProblems {
    pub fn one(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigProblems(vec![Problem { field: field.into(), message: message.into() }])
    }
}

/// Parses an environment value as a TOML literal, falling back to a plain
/// string (so `NETZERO__LLM__MODEL=gpt-4` needs no quoting).
fn env_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn insert_at(table: &mut toml::Table, path: &[String], value: toml::Value) -> Result<(), String> {
    let (first, rest) = path.split_first().expect("non-empty path");
    if rest.is_empty() {
        table.insert(first.clone(), value);
        return Ok(());
    }
    match table.entry(first.clone()).or_insert_with(|| toml::Value::Table(toml::Table::new())) {
        toml::Value::Table(t) => insert_at(t, rest, value),
        _ => Err(format!("{first} is not a section")),
    }
}

fn apply_overrides(table: &mut toml::Table, vars: impl IntoIterator<Item = (String, String)>) -> Result<(), ConfigProblems> {
    let mut problems = Vec::new();
    let mut vars: Vec<(String, String)> = vars.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    vars.sort();
    for (key, raw) in vars {
        let path: Vec<String> = key[ENV_PREFIX.len()..].split("__").map(str::to_lowercase).collect();
        if path.iter().any(String::is_empty) {
            problems.push(Problem { field: key.clone(), message: "malformed override name".into() });
            continue;
        }
        if let Err(msg) = insert_at(table, &path, env_value(&raw)) {
            problems.push(Problem { field: path.join("."), message: msg });
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(ConfigProblems(problems))
    }
}

fn field_of(path: &serde_path_to_error::Path) -> String {
    let s = path.to_string();
    if s == "." {
        "config".into()
    } else {
        s
    }
}

/// Reads `file` (if any), applies environment overrides from `vars` and
/// deserializes. Unknown keys and type errors name the offending field.
pub fn load(file: Option<&Path>, vars: impl IntoIterator<Item = (String, String)>) -> anyhow::Result<RunConfig> {
    let mut table = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            toml::from_str::<toml::Table>(&text).map_err(|e| ConfigProblems::one(path.display().to_string(), e.message().to_string()))?
        }
        None => toml::Table::new(),
    };
    apply_overrides(&mut table, vars)?;
    let config: RunConfig = serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
        let field = field_of(e.path());
        ConfigProblems::one(field, e.into_inner().message().to_string())
    })?;
    Ok(config)
}

impl RunConfig {
    /// Value checks that do not touch the file system.
    pub fn check_values(&self) -> Vec<Problem> {
        let mut out = Vec::new();
        let mut bad = |field: &str, message: String| out.push(Problem { field: field.into(), message });
        if self.k < 2 {
            bad("k", format!("must be at least 2, got {}", self.k));
        }
        let c = &self.classifier;
        if !(2..=3).contains(&c.num_labels) {
            bad("classifier.num_labels", format!("must be 2 or 3, got {}", c.num_labels));
        }
        if c.epochs < 1 {
            bad("classifier.epochs", "must be at least 1".into());
        }
        if c.batch_size < 1 {
            bad("classifier.batch_size", "must be at least 1".into());
        }
        if c.grad_accumulation < 1 {
            bad("classifier.grad_accumulation", "must be at least 1".into());
        }
        if !(0.0..1.0).contains(&c.warmup_ratio) {
            bad("classifier.warmup_ratio", format!("must lie in [0, 1), got {}", c.warmup_ratio));
        }
        if !(c.learning_rate > 0.0 && c.learning_rate.is_finite()) {
            bad("classifier.learning_rate", format!("must be positive, got {}", c.learning_rate));
        }
        if !(self.grid.subsample > 0.0 && self.grid.subsample <= 1.0) {
            bad("grid.subsample", format!("must lie in (0, 1], got {}", self.grid.subsample));
        }
        for (field, empty) in [
            ("grid.learning_rates", self.grid.learning_rates.is_empty()),
            ("grid.epochs", self.grid.epochs.is_empty()),
            ("grid.batch_sizes", self.grid.batch_sizes.is_empty()),
        ] {
            if empty {
                bad(field, "must list at least one value".into());
            }
        }
        if self.llm.max_in_flight < 1 {
            bad("llm.max_in_flight", "must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.ambition.confidence) {
            bad("ambition.confidence", format!("must lie in [0, 1], got {}", self.ambition.confidence));
        }
        if let Err(e) = parse_thresholds(&self.ambition.thresholds) {
            bad("ambition.thresholds", e);
        }
        out
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// `start:stop:step` or a comma-separated ascending list.
pub fn parse_thresholds(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [a, b, s] = parts.as_slice() else {
            return Err(format!("expected start:stop:step, got {spec:?}"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("{x:?} is not a number"));
        netzero::ambition::threshold_grid(num(a)?, num(b)?, num(s)?).map_err(|e| e.to_string())?
    } else {
        spec.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| format!("{x:?} is not a number"))).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err("no thresholds".into());
    }
    if values.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err("thresholds must lie in [0, 1]".into());
    }
    if values.windows(2).any(|w| w[0] > w[1]) {
        return Err("thresholds must be ascending".into());
    }
    Ok(values)
}

/// What a command needs from `paths`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Need {
    File,
    Dir,
}

/// Checks that every required path is set and exists, collecting all
/// problems before any work starts.
pub fn check_paths(paths: &Paths, required: &[(&str, Need)]) -> Vec<Problem> {
    let mut out = Vec::new();
    for &(name, need) in required {
        let value: Vec<&PathBuf> = match name {
            "non_target" => paths.non_target.iter().collect(),
            _ => lookup(paths, name).into_iter().collect(),
        };
        let field = format!("paths.{name}");
        if value.is_empty() && name != "non_target" {
            out.push(Problem { field, message: "required by this command but not set".into() });
            continue;
        }
        for p in value {
            let ok = match need {
                Need::File => p.is_file(),
                Need::Dir => p.is_dir(),
            };
            if !ok {
                let kind = if need == Need::File { "file" } else { "directory" };
                out.push(Problem { field: field.clone(), message: format!("{kind} {} does not exist", p.display()) });
            }
        }
    }
    out
}

/// Optional paths are validated only when set.
pub fn check_optional(paths: &Paths, optional: &[(&str, Need)]) -> Vec<Problem> {
    let set: Vec<(&str, Need)> = optional.iter().copied().filter(|(n, _)| lookup(paths, n).is_some()).collect();
    check_paths(paths, &set)
}

fn lookup<'a>(paths: &'a Paths, name: &str) -> Option<&'a PathBuf> {
    match name {
        "outputs" => paths.outputs.as_ref(),
        "dataset" => paths.dataset.as_ref(),
        "claims" => paths.claims.as_ref(),
        "mapping" => paths.mapping.as_ref(),
        "models" => paths.models.as_ref(),
        "llm_cache" => paths.llm_cache.as_ref(),
        "prompt_template" => paths.prompt_template.as_ref(),
        "ambition_gold" => paths.ambition_gold.as_ref(),
        "ambition_claims" => paths.ambition_claims.as_ref(),
        "qa_replay" => paths.qa_replay.as_ref(),
        "corpus" => paths.corpus.as_ref(),
        "climate_model" => paths.climate_model.as_ref(),
        "target_model" => paths.target_model.as_ref(),
        "records" => paths.records.as_ref(),
        "cv_report" => paths.cv_report.as_ref(),
        "review" => paths.review.as_ref(),
        "exclusions" => paths.exclusions.as_ref(),
        other => unreachable!("unknown path field {other}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = RunConfig::default();
        let back: RunConfig = toml::from_str(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert!(c.check_values().is_empty());
    }

    #[test]
    fn env_overrides_nested_and_top_level() {
        let c = load(
            None,
            vars(&[("NETZERO__CLASSIFIER__EPOCHS", "3"), ("NETZERO__SEED", "7"), ("NETZERO__LLM__MODEL", "gpt-4"), ("OTHER", "x")]),
        )
        .unwrap();
        assert_eq!(c.classifier.epochs, 3);
        assert_eq!(c.seed, 7);
        assert_eq!(c.llm.model, "gpt-4");
    }

    #[test]
    fn unknown_field_is_reported_with_its_path() {
        let err = load(None, vars(&[("NETZERO__CLASSIFIER__EPOCHZ", "3")])).unwrap_err();
        let problems = err.downcast_ref::<ConfigProblems>().unwrap();
        assert_eq!(problems.0[0].field, "classifier.epochz");
        assert!(problems.0[0].message.contains("epochz"));
    }

    #[test]
    fn type_error_names_the_field() {
        let err = load(None, vars(&[("NETZERO__CLASSIFIER__EPOCHS", "\"many\"")])).unwrap_err();
        let problems = err.downcast_ref::<ConfigProblems>().unwrap();
        assert_eq!(problems.0[0].field, "classifier.epochs");
    }

    #[test]
    fn value_checks_collect_every_problem() {
        let mut c = RunConfig { k: 1, ..RunConfig::default() };
        c.classifier.epochs = 0;
        c.ambition.thresholds = "1:0:0.1".into();
        let fields: Vec<String> = c.check_values().into_iter().map(|p| p.field).collect();
        assert_eq!(fields, ["k", "classifier.epochs", "ambition.thresholds"]);
    }

    #[test]
    fn thresholds_specs() {
        assert_eq!(parse_thresholds("0:1:0.05").unwrap().len(), 21);
        assert_eq!(parse_thresholds("0.1, 0.5,0.9").unwrap(), vec![0.1, 0.5, 0.9]);
        assert!(parse_thresholds("0.5,0.1").is_err());
        assert!(parse_thresholds("0:2:0.5").is_err());
    }

    #[test]
    fn missing_paths_are_listed() {
        let p = Paths { corpus: Some("/definitely/not/here".into()), ..Paths::default() };
        let problems = check_paths(&p, &[("dataset", Need::File), ("corpus", Need::Dir)]);
        assert_eq!(problems.len(), 2);
        assert_eq!(problems[0].field, "paths.dataset");
        assert!(problems[1].message.contains("does not exist"));
    }
}
