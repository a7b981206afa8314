//! Backend abstraction: anything that can be trained on labeled texts and
//! then emit class probabilities.

use std::fs;
use std::marker::PhantomData;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifier::config::ClassifierConfig;
use crate::classifier::ngram::{NgramBackend, NgramModel, NgramSpec};
use crate::error::{Error, Result};
use crate::label::ClassLabel;

/// Texts with class indices into the task's label vocabulary.
#[derive(Debug, Clone, Copy)]
pub struct TrainSet<'a> {
    pub texts: &'a [&'a str],
    pub labels: &'a [usize],
}

impl TrainSet<'_> {
    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }
}

/// A trainable sequence-classification backend.
pub trait Backend: Send + Sync {
    fn name(&self) -> &str;

    /// Trains a fresh model. `val` drives checkpoint selection and early
    /// stopping; `seed` replaces `config.seed` so folds stay independent.
    fn train(
        &self,
        train: TrainSet<'_>,
        val: TrainSet<'_>,
        num_labels: usize,
        config: &ClassifierConfig,
        seed: u64,
    ) -> Result<Box<dyn TrainedModel>>;
}

pub trait TrainedModel: Send + Sync {
    fn num_labels(&self) -> usize;

    /// One probability vector per text, in input order.
    fn predict_proba(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>>;

    /// Validation accuracy per completed epoch, when the backend tracks it.
    fn history(&self) -> &[f64] {
        &[]
    }

    /// Writes backend-specific files into `dir`. Returns the kind tag used to
    /// reload them.
    fn save(&self, dir: &Path) -> Result<&'static str>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<L> {
    pub label: L,
    pub probabilities: Vec<f64>,
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

impl<L: ClassLabel> Prediction<L> {
    pub fn from_probabilities(probabilities: Vec<f64>) -> Self {
        let label = L::from_index(argmax(&probabilities)).expect("probability vector sized to label set");
        Prediction { label, probabilities }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct LabelMapFile {
    labels: Vec<String>,
    kind: String,
}

/// A trained model bound to its label vocabulary and training config.
pub struct ModelHandle<L> {
    model: Box<dyn TrainedModel>,
    config: ClassifierConfig,
    _labels: PhantomData<L>,
}

impl<L: ClassLabel> std::fmt::Debug for ModelHandle<L> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelHandle").field("config", &self.config).finish_non_exhaustive()
    }
}

impl<L: ClassLabel> ModelHandle<L> {
    pub fn new(model: Box<dyn TrainedModel>, config: ClassifierConfig) -> Result<Self> {
        if model.num_labels() != L::ALL.len() {
            return Err(Error::Config(format!("model emits {} classes but the label set has {}", model.num_labels(), L::ALL.len())));
        }
        Ok(ModelHandle { model, config, _labels: PhantomData })
    }

    pub fn config(&self) -> &ClassifierConfig {
        &self.config
    }

    pub fn history(&self) -> &[f64] {
        self.model.history()
    }

    /// Predicts in batches of `config.batch_size`; order is preserved.
    pub fn predict<S: AsRef<str>>(&self, texts: &[S]) -> Result<Vec<Prediction<L>>> {
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(self.config.batch_size.max(1)) {
            let refs: Vec<&str> = chunk.iter().map(AsRef::as_ref).collect();
            let probs = self.model.predict_proba(&refs)?;
            if probs.len() != refs.len() {
                return Err(Error::Input(format!("backend returned {} rows for {} texts", probs.len(), refs.len())));
            }
            out.extend(probs.into_iter().map(Prediction::from_probabilities));
        }
        Ok(out)
    }

    /// Directory layout: `config.json`, `label_map.json` and the backend's
    /// weight files.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let kind = self.model.save(dir)?;
        let labels = LabelMapFile { labels: L::ALL.iter().map(|l| l.to_string()).collect(), kind: kind.to_string() };
        write_json(&dir.join("label_map.json"), &labels)?;
        write_json(&dir.join("config.json"), &self.config)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let labels: LabelMapFile = read_json(&dir.join("label_map.json"))?;
        let expected: Vec<String> = L::ALL.iter().map(|l| l.to_string()).collect();
        if labels.labels != expected {
            return Err(Error::Config(format!("model labels {:?} do not match {:?}", labels.labels, expected)));
        }
        let config: ClassifierConfig = read_json(&dir.join("config.json"))?;
        let model: Box<dyn TrainedModel> = match labels.kind.as_str() {
            NgramModel::KIND => Box::new(NgramModel::load(dir)?),
            other => return Err(Error::ModelNotFound(format!("unknown model kind {other:?} in {}", dir.display()))),
        };
        Self::new(model, config)
    }
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e))
}

/// Resolves a base model id to a backend.
///
/// Built-in ids are the hashed n-gram bases. Any other id must name a
/// directory under `store` holding a `base.toml` n-gram specification.
pub fn resolve_base(base_model_id: &str, store: Option<&Path>) -> Result<Box<dyn Backend>> {
    if let Some(spec) = NgramSpec::builtin(base_model_id) {
        return Ok(Box::new(NgramBackend::new(base_model_id, spec)));
    }
    if let Some(store) = store {
        let path: PathBuf = store.join(base_model_id).join("base.toml");
        if path.is_file() {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let spec: NgramSpec = toml::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e))?;
            return Ok(Box::new(NgramBackend::new(base_model_id, spec)));
        }
    }
    Err(Error::ModelNotFound(base_model_id.to_string()))
}
