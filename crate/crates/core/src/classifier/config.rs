use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How per-class precision, recall and F1 are combined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    #[default]
    Macro,
    Weighted,
}

/// Fine-tuning hyperparameters. Defaults are the base case used for the
/// published five-fold runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub base_model_id: String,
    pub num_labels: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub grad_accumulation: usize,
    pub warmup_ratio: f64,
    pub learning_rate: f64,
    pub patience: usize,
    pub seed: u64,
    pub averaging: Averaging,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            base_model_id: crate::classifier::ngram::DEFAULT_BASE.to_string(),
            num_labels: 3,
            epochs: 10,
            batch_size: 32,
            grad_accumulation: 2,
            warmup_ratio: 0.1,
            learning_rate: 5e-5,
            patience: 5,
            seed: 42,
            averaging: Averaging::Macro,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !(2..=3).contains(&self.num_labels) {
            return fail(format!("num_labels must be 2 or 3, got {}", self.num_labels));
        }
        if self.epochs < 1 {
            return fail("epochs must be at least 1".into());
        }
        if self.batch_size < 1 {
            return fail("batch_size must be at least 1".into());
        }
        if self.grad_accumulation < 1 {
            return fail("grad_accumulation must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.warmup_ratio) {
            return fail(format!("warmup_ratio must lie in [0, 1), got {}", self.warmup_ratio));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        Ok(())
    }
}
