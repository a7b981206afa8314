//! Native backend: softmax regression over hashed word n-grams.
//!
//! Texts are lowercased and split into alphanumeric runs (plus `%` as its own
//! token), truncated to `max_tokens`, and expanded into 1..=`max_n`-grams
//! hashed into `2^dim_bits` buckets. Feature values are `ln(1 + tf)`,
//! L2-normalised per text. Training is mini-batch AdamW with lazy (touched
//! rows only) moment updates, linear warmup then linear decay, gradient
//! accumulation and early stopping on validation accuracy.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::classifier::backend::{read_json, write_json, Backend, TrainSet, TrainedModel};
use crate::classifier::config::ClassifierConfig;
use crate::error::{Error, Result};
use crate::seed;

pub const DEFAULT_BASE: &str = "ngram-logreg";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NgramSpec {
    pub dim_bits: u32,
    pub max_n: usize,
    pub max_tokens: usize,
    /// Multiplier applied to the configured learning rate, which is given on
    /// the scale used for transformer fine-tuning.
    pub lr_scale: f64,
    pub weight_decay: f64,
}

impl Default for NgramSpec {
    fn default() -> Self {
        NgramSpec { dim_bits: 18, max_n: 2, max_tokens: 512, lr_scale: 1000.0, weight_decay: 0.0 }
    }
}

impl NgramSpec {
    pub const BUILTIN: [&'static str; 3] = ["ngram-logreg", "unigram-logreg", "trigram-logreg"];

    pub fn builtin(id: &str) -> Option<NgramSpec> {
        let base = NgramSpec::default();
        match id {
            "ngram-logreg" => Some(base),
            "unigram-logreg" => Some(NgramSpec { max_n: 1, ..base }),
            "trigram-logreg" => Some(NgramSpec { max_n: 3, ..base }),
            _ => None,
        }
    }

    fn dim(&self) -> usize {
        1usize << self.dim_bits
    }
}

fn fnv1a(parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            h ^= 0x20;
            h = h.wrapping_mul(0x100_0000_01b3);
        }
        for b in p.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100_0000_01b3);
        }
    }
    // order tag keeps a unigram from colliding with a bigram of the same bytes
    h ^= parts.len() as u64;
    h.wrapping_mul(0x100_0000_01b3)
}

pub(crate) fn tokenize(text: &str, max_tokens: usize) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for c in text.chars().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() {
            cur.push(c);
            continue;
        }
        if !cur.is_empty() {
            tokens.push(std::mem::take(&mut cur));
        }
        if c == '%' {
            tokens.push("%".to_string());
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens.truncate(max_tokens);
    tokens
}

type SparseVec = Vec<(u32, f32)>;

fn featurize(spec: &NgramSpec, text: &str) -> SparseVec {
    let tokens = tokenize(text, spec.max_tokens);
    let refs: Vec<&str> = tokens.iter().map(String::as_str).collect();
    let mask = (spec.dim() - 1) as u64;
    let mut counts: HashMap<u32, f32> = HashMap::new();
    for n in 1..=spec.max_n.max(1) {
        for w in refs.windows(n) {
            *counts.entry((fnv1a(w) & mask) as u32).or_default() += 1.0;
        }
    }
    let mut v: SparseVec = counts.into_iter().map(|(k, c)| (k, c.ln_1p())).collect();
    v.sort_unstable_by_key(|(k, _)| *k);
    let norm = v.iter().map(|(_, x)| x * x).sum::<f32>().sqrt();
    if norm > 0.0 {
        for (_, x) in &mut v {
            *x /= norm;
        }
    }
    v
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelMeta {
    spec: NgramSpec,
    num_labels: usize,
    history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct NgramModel {
    spec: NgramSpec,
    num_labels: usize,
    weights: Vec<f32>,
    bias: Vec<f32>,
    history: Vec<f64>,
}

impl NgramModel {
    pub const KIND: &'static str = "hashed-ngram-softmax";

    fn zeros(spec: NgramSpec, num_labels: usize) -> Self {
        NgramModel { weights: vec![0.0; spec.dim() * num_labels], bias: vec![0.0; num_labels], spec, num_labels, history: Vec::new() }
    }

    fn logits(&self, x: &SparseVec) -> Vec<f64> {
        let k = self.num_labels;
        let mut out: Vec<f64> = self.bias.iter().map(|&b| b as f64).collect();
        for &(f, v) in x {
            let row = &self.weights[f as usize * k..(f as usize + 1) * k];
            for (o, w) in out.iter_mut().zip(row) {
                *o += (w * v) as f64;
            }
        }
        out
    }

    fn accuracy(&self, xs: &[SparseVec], ys: &[usize]) -> f64 {
        let correct = xs.iter().zip(ys).filter(|(x, &y)| crate::classifier::backend::argmax(&self.logits(x)) == y).count();
        correct as f64 / xs.len() as f64
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let meta: ModelMeta = read_json(&dir.join("ngram.json"))?;
        let path = dir.join("weights.bin");
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let floats: Vec<f32> = bytes.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
        let expected = meta.spec.dim() * meta.num_labels + meta.num_labels;
        if floats.len() != expected || bytes.len() % 4 != 0 {
            return Err(Error::parse(path.display().to_string(), format!("expected {expected} weights, found {}", floats.len())));
        }
        let split = meta.spec.dim() * meta.num_labels;
        Ok(NgramModel {
            weights: floats[..split].to_vec(),
            bias: floats[split..].to_vec(),
            spec: meta.spec,
            num_labels: meta.num_labels,
            history: meta.history,
        })
    }
}

impl TrainedModel for NgramModel {
    fn num_labels(&self) -> usize {
        self.num_labels
    }

    fn predict_proba(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>> {
        Ok(texts.iter().map(|t| softmax(&self.logits(&featurize(&self.spec, t)))).collect())
    }

    fn history(&self) -> &[f64] {
        &self.history
    }

    fn save(&self, dir: &Path) -> Result<&'static str> {
        let meta = ModelMeta { spec: self.spec.clone(), num_labels: self.num_labels, history: self.history.clone() };
        write_json(&dir.join("ngram.json"), &meta)?;
        let mut bytes = Vec::with_capacity((self.weights.len() + self.bias.len()) * 4);
        for w in self.weights.iter().chain(&self.bias) {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
        let path = dir.join("weights.bin");
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        Ok(Self::KIND)
    }
}

#[derive(Debug, Clone)]
pub struct NgramBackend {
    name: String,
    spec: NgramSpec,
}

impl NgramBackend {
    pub fn new(name: impl Into<String>, spec: NgramSpec) -> Self {
        NgramBackend { name: name.into(), spec }
    }
}

/// Per-parameter AdamW state with lazily updated rows.
struct Adam {
    m: Vec<f32>,
    v: Vec<f32>,
    t: i32,
}

const BETA1: f32 = 0.9;
const BETA2: f32 = 0.999;
const EPS: f32 = 1e-8;

impl Adam {
    fn new(n: usize) -> Self {
        Adam { m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    fn update(&mut self, params: &mut [f32], grads: &[f32], offset: usize, lr: f32, wd: f32) {
        let c1 = 1.0 - BETA1.powi(self.t);
        let c2 = 1.0 - BETA2.powi(self.t);
        for (i, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            let j = offset + i;
            self.m[j] = BETA1 * self.m[j] + (1.0 - BETA1) * g;
            self.v[j] = BETA2 * self.v[j] + (1.0 - BETA2) * g * g;
            let mhat = self.m[j] / c1;
            let vhat = self.v[j] / c2;
            *p -= lr * (mhat / (vhat.sqrt() + EPS) + wd * *p);
        }
    }
}

/// Linear warmup to the peak rate, then linear decay to zero.
pub(crate) fn schedule(step: usize, total: usize, warmup: usize, peak: f64) -> f64 {
    if step < warmup {
        peak * (step + 1) as f64 / warmup as f64
    } else {
        peak * (total - step) as f64 / (total - warmup).max(1) as f64
    }
}

impl Backend for NgramBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn train(
        &self,
        train: TrainSet<'_>,
        val: TrainSet<'_>,
        num_labels: usize,
        config: &ClassifierConfig,
        seed: u64,
    ) -> Result<Box<dyn TrainedModel>> {
        config.validate()?;
        if train.is_empty() {
            return Err(Error::Config("training set is empty".into()));
        }
        if let Some(bad) = train.labels.iter().chain(val.labels).find(|&&y| y >= num_labels) {
            return Err(Error::Config(format!("label index {bad} outside {num_labels} classes")));
        }
        let k = num_labels;
        let xs: Vec<SparseVec> = train.texts.iter().map(|t| featurize(&self.spec, t)).collect();
        let val_xs: Vec<SparseVec> = val.texts.iter().map(|t| featurize(&self.spec, t)).collect();

        let mut model = NgramModel::zeros(self.spec.clone(), k);
        let mut adam_w = Adam::new(model.weights.len());
        let mut adam_b = Adam::new(k);
        let mut grad = vec![0f32; model.weights.len()];
        let mut touched: Vec<u32> = Vec::new();
        let mut is_touched = vec![false; self.spec.dim()];
        let mut grad_b = vec![0f32; k];

        let batches_per_epoch = xs.len().div_ceil(config.batch_size);
        let steps_per_epoch = batches_per_epoch.div_ceil(config.grad_accumulation);
        let total_steps = steps_per_epoch * config.epochs;
        let warmup = (config.warmup_ratio * total_steps as f64).ceil() as usize;
        let peak = config.learning_rate * self.spec.lr_scale;
        let wd = self.spec.weight_decay as f32;

        let mut rng = seed::rng(seed);
        let mut order: Vec<usize> = (0..xs.len()).collect();
        let mut step = 0usize;
        let mut best: Option<(f64, Vec<f32>, Vec<f32>)> = None;
        let mut stale = 0usize;

        for _epoch in 0..config.epochs {
            order.shuffle(&mut rng);
            let groups: Vec<&[usize]> = order.chunks(config.batch_size * config.grad_accumulation).collect();
            for group in groups {
                let scale = 1.0 / group.len() as f32;
                for &i in group {
                    let p = softmax(&model.logits(&xs[i]));
                    for c in 0..k {
                        let g = (p[c] as f32 - if train.labels[i] == c { 1.0 } else { 0.0 }) * scale;
                        grad_b[c] += g;
                        for &(f, v) in &xs[i] {
                            grad[f as usize * k + c] += g * v;
                        }
                    }
                    for &(f, _) in &xs[i] {
                        if !is_touched[f as usize] {
                            is_touched[f as usize] = true;
                            touched.push(f);
                        }
                    }
                }
                let lr = schedule(step, total_steps, warmup, peak) as f32;
                adam_w.t += 1;
                adam_b.t += 1;
                for &f in &touched {
                    let lo = f as usize * k;
                    adam_w.update(&mut model.weights[lo..lo + k], &grad[lo..lo + k], lo, lr, wd);
                    grad[lo..lo + k].iter_mut().for_each(|g| *g = 0.0);
                    is_touched[f as usize] = false;
                }
                touched.clear();
                adam_b.update(&mut model.bias, &grad_b, 0, lr, 0.0);
                grad_b.iter_mut().for_each(|g| *g = 0.0);
                step += 1;
            }

            if val_xs.is_empty() {
                continue;
            }
            let acc = model.accuracy(&val_xs, val.labels);
            model.history.push(acc);
            match &best {
                Some((b, _, _)) if acc <= *b => {
                    stale += 1;
                    if stale >= config.patience.max(1) {
                        break;
                    }
                }
                _ => {
                    best = Some((acc, model.weights.clone(), model.bias.clone()));
                    stale = 0;
                }
            }
        }
        if let Some((_, w, b)) = best {
            model.weights = w;
            model.bias = b;
        }
        Ok(Box::new(model))
    }
}
