//! Deterministic stand-in backends for harness checks.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use crate::classifier::backend::{Backend, TrainSet, TrainedModel};
use crate::classifier::config::ClassifierConfig;
use crate::error::{Error, Result};

fn one_hot(k: usize, c: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[c] = 1.0;
    v
}

/// Answers from a fixed text → class table. Unknown texts get `fallback`, or
/// an error when no fallback is set.
#[derive(Debug, Clone)]
pub struct LookupModel {
    table: Arc<HashMap<String, usize>>,
    num_labels: usize,
    fallback: Option<usize>,
}

impl LookupModel {
    pub fn new(table: HashMap<String, usize>, num_labels: usize, fallback: Option<usize>) -> Self {
        LookupModel { table: Arc::new(table), num_labels, fallback }
    }
}

impl TrainedModel for LookupModel {
    fn num_labels(&self) -> usize {
        self.num_labels
    }

    fn predict_proba(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>> {
        texts
            .iter()
            .map(|t| {
                self.table
                    .get(*t)
                    .copied()
                    .or(self.fallback)
                    .map(|c| one_hot(self.num_labels, c))
                    .ok_or_else(|| Error::Input(format!("no lookup entry for {t:?}")))
            })
            .collect()
    }

    fn save(&self, _dir: &Path) -> Result<&'static str> {
        Err(Error::Config("lookup stubs cannot be saved".into()))
    }
}

/// "Trains" by memorising gold labels of every text it is shown, including
/// the validation texts, so predictions are always correct.
#[derive(Debug, Clone, Copy, Default)]
pub struct GoldEchoBackend;

impl Backend for GoldEchoBackend {
    fn name(&self) -> &str {
        "gold-echo"
    }

    fn train(
        &self,
        train: TrainSet<'_>,
        val: TrainSet<'_>,
        num_labels: usize,
        _config: &ClassifierConfig,
        _seed: u64,
    ) -> Result<Box<dyn TrainedModel>> {
        let table =
            train.texts.iter().zip(train.labels).chain(val.texts.iter().zip(val.labels)).map(|(t, &y)| (t.to_string(), y)).collect();
        Ok(Box::new(LookupModel::new(table, num_labels, None)))
    }
}

/// Always predicts one class.
#[derive(Debug, Clone, Copy)]
pub struct ConstantBackend(pub usize);

impl Backend for ConstantBackend {
    fn name(&self) -> &str {
        "constant"
    }

    fn train(
        &self,
        _train: TrainSet<'_>,
        _val: TrainSet<'_>,
        num_labels: usize,
        _config: &ClassifierConfig,
        _seed: u64,
    ) -> Result<Box<dyn TrainedModel>> {
        Ok(Box::new(LookupModel::new(HashMap::new(), num_labels, Some(self.0))))
    }
}
