pub mod corpus;
pub mod data;
pub mod eval;
pub mod model;
pub mod report;
pub mod review;

use std::path::PathBuf;

use anyhow::Result;
use netzero::classifier::stub::GoldEchoBackend;
use netzero::classifier::{resolve_base, Backend};
use netzero::ingest::{read_dataset, to_binary, LabeledSample};
use netzero::{BinaryLabel, ClassLabel, ClimateLabel, TargetLabel};

use crate::config::{Problem, RunConfig};
use crate::run::RunDir;

/// One CLI command: fold its flags into the config, say what it needs, run.
pub trait Step {
    fn apply(&self, config: &mut RunConfig);

    /// Problems that must stop the run before any work starts.
    fn check(&self, config: &RunConfig) -> Vec<Problem>;

    /// Does the work, writing artifacts into `run`, and returns a small JSON
    /// summary for stdout.
    fn execute(&self, config: &RunConfig, run: &mut RunDir) -> Result<serde_json::Value>;
}

pub fn set_path(slot: &mut Option<PathBuf>, flag: &Option<PathBuf>) {
    if let Some(p) = flag {
        *slot = Some(p.clone());
    }
}

pub fn set<T: Clone>(slot: &mut T, flag: &Option<T>) {
    if let Some(v) = flag {
        *slot = v.clone();
    }
}

/// Label set a classifier command works on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Task {
    /// NET_ZERO / REDUCTION / NONE
    Target,
    /// TARGET / NONE, with net-zero claims counted as targets
    Binary,
    /// CLIMATE / NOT_CLIMATE, the corpus pipeline's first stage
    Climate,
}

impl Task {
    pub fn num_labels(self) -> usize {
        match self {
            Task::Target => TargetLabel::ALL.len(),
            Task::Binary => BinaryLabel::ALL.len(),
            Task::Climate => ClimateLabel::ALL.len(),
        }
    }
}

/// Binary datasets may be stored with three-class labels; those are
/// collapsed on load.
pub fn read_binary(path: &std::path::Path) -> Result<Vec<LabeledSample<BinaryLabel>>> {
    match read_dataset::<TargetLabel>(path) {
        Ok(samples) => Ok(to_binary(&samples)),
        Err(_) => Ok(read_dataset::<BinaryLabel>(path)?),
    }
}

/// Built-in n-gram bases, descriptors in `paths.models`, and `gold-echo`
/// for harness checks.
pub fn backend_for(id: &str, config: &RunConfig) -> netzero::Result<Box<dyn Backend>> {
    if id == "gold-echo" {
        return Ok(Box::new(GoldEchoBackend));
    }
    resolve_base(id, config.paths.models.as_deref())
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| format!("{v:.6}"))
}

pub fn label_header<L: ClassLabel>() -> String {
    L::ALL.iter().map(|l| l.name()).collect::<Vec<_>>().join("\t")
}

/// Calls `f` with the dataset for `task`, typed by its label set.
#[macro_export]
macro_rules! with_task_dataset {
    ($task:expr, $path:expr, |$samples:ident| $body:expr) => {
        match $task {
            $crate::commands::Task::Target => {
                let $samples = netzero::ingest::read_dataset::<netzero::TargetLabel>($path)?;
                $body
            }
            $crate::commands::Task::Binary => {
                let $samples = $crate::commands::read_binary($path)?;
                $body
            }
            $crate::commands::Task::Climate => {
                let $samples = netzero::ingest::read_dataset::<netzero::ClimateLabel>($path)?;
                $body
            }
        }
    };
}
