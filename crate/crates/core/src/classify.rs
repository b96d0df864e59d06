//! Seeded logistic-regression baseline over mean word embeddings.
//!
//! Training is plain mini-batch gradient descent on binary cross-entropy with
//! the usual fine-tuning controls:
//!
//! - linear warmup of the learning rate from 0 over `warmup_ratio` of all
//!   steps, then linear decay back to 0 at the final step
//! - decoupled weight decay on the weights (not the bias)
//! - per-batch clipping of the joint (weights, bias) gradient norm
//! - per-epoch shuffles drawn from `manual_seed`
//!
//! Parameters start at zero, so an untrained model scores every text 0.5.

use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::{write_entries, DataFormat, Dataset, Label, Sample, Split};
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::seed::{derived_rng, short_digest};

/// Train-set size from which the large-corpus defaults apply.
pub const LARGE_CORPUS_THRESHOLD: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub warmup_ratio: f64,
    pub max_grad_norm: f64,
    pub num_train_epochs: usize,
    pub train_batch_size: usize,
    pub max_seq_length: usize,
    pub manual_seed: u64,
}

impl Default for ClassifierConfig {
    /// The small, manually annotated corpus setting: 13 epochs of batch 16.
    fn default() -> Self {
        ClassifierConfig {
            learning_rate: 1e-5,
            weight_decay: 0.01,
            warmup_ratio: 0.2,
            max_grad_norm: 1.0,
            num_train_epochs: 13,
            train_batch_size: 16,
            max_seq_length: 40,
            manual_seed: 128,
        }
    }
}

impl ClassifierConfig {
    /// 8 epochs of batch 32, for large distantly supervised corpora.
    pub fn large_corpus() -> Self {
        ClassifierConfig {
            num_train_epochs: 8,
            train_batch_size: 32,
            ..Default::default()
        }
    }

    pub fn for_train_size(n_train: usize) -> Self {
        if n_train >= LARGE_CORPUS_THRESHOLD {
            Self::large_corpus()
        } else {
            Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("classifier.{m}")));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return bad("weight_decay must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.warmup_ratio) {
            return bad("warmup_ratio must lie in [0, 1]");
        }
        if !(self.max_grad_norm > 0.0) {
            return bad("max_grad_norm must be positive");
        }
        if self.train_batch_size == 0 {
            return bad("train_batch_size must be at least 1");
        }
        if self.max_seq_length == 0 {
            return bad("max_seq_length must be at least 1");
        }
        Ok(())
    }

    pub fn fingerprint(&self) -> String {
        short_digest(
            serde_json::to_string(self)
                .expect("config serializes")
                .as_bytes(),
        )
    }
}

/// Linear warmup then linear decay, evaluated at optimizer step indices
/// `0..=total_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrSchedule {
    pub peak: f64,
    pub warmup_steps: usize,
    pub total_steps: usize,
}

impl LrSchedule {
    pub fn new(peak: f64, warmup_ratio: f64, total_steps: usize) -> Self {
        let warmup_steps = ((warmup_ratio * total_steps as f64).ceil() as usize).min(total_steps);
        LrSchedule {
            peak,
            warmup_steps,
            total_steps,
        }
    }

    pub fn rate(&self, step: usize) -> f64 {
        if step < self.warmup_steps {
            self.peak * step as f64 / self.warmup_steps as f64
        } else if self.total_steps > self.warmup_steps {
            let left = self.total_steps.saturating_sub(step) as f64;
            self.peak * left / (self.total_steps - self.warmup_steps) as f64
        } else {
            // warmup covers every step
            self.peak
        }
    }
}

/// Mean of the vectors of the first `max_seq_length` in-vocabulary tokens.
pub fn featurize(text: &str, table: &EmbeddingTable, max_seq_length: usize) -> Vec<f64> {
    let mut sum = vec![0.0f64; table.dim()];
    let mut count = 0usize;
    for row in text
        .split_whitespace()
        .filter_map(|t| table.lookup(t))
        .take(max_seq_length)
    {
        for (s, &x) in sum.iter_mut().zip(row) {
            *s += x as f64;
        }
        count += 1;
    }
    if count > 0 {
        let n = count as f64;
        sum.iter_mut().for_each(|s| *s /= n);
    }
    sum
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub dim: usize,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub config_fingerprint: String,
}

impl TrainedModel {
    pub fn zeros(dim: usize, config_fingerprint: String) -> Self {
        TrainedModel {
            dim,
            weights: vec![0.0; dim],
            bias: 0.0,
            config_fingerprint,
        }
    }

    pub fn logit(&self, features: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(features)
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + self.bias
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json + "\n").map_err(|e| Error::write(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
        let model: TrainedModel = serde_json::from_str(&text)?;
        if model.weights.len() != model.dim {
            return Err(Error::InvalidFile {
                path: path.to_path_buf(),
                message: format!("{} weights for dim {}", model.weights.len(), model.dim),
            });
        }
        Ok(model)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean binary cross-entropy of a linear model over a batch.
pub fn batch_loss(weights: &[f64], bias: f64, xs: &[&[f64]], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    xs.iter()
        .zip(ys)
        .map(|(x, &y)| {
            let z: f64 = weights
                .iter()
                .zip(x.iter())
                .map(|(w, v)| w * v)
                .sum::<f64>()
                + bias;
            // log(1 + e^z) - y z, computed stably
            let softplus = if z > 0.0 {
                z + (-z).exp().ln_1p()
            } else {
                z.exp().ln_1p()
            };
            softplus - y * z
        })
        .sum::<f64>()
        / n
}

/// Analytic gradient of [`batch_loss`]: returns (d/dweights, d/dbias).
pub fn batch_gradient(weights: &[f64], bias: f64, xs: &[&[f64]], ys: &[f64]) -> (Vec<f64>, f64) {
    let n = xs.len() as f64;
    let mut gw = vec![0.0; weights.len()];
    let mut gb = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let z: f64 = weights
            .iter()
            .zip(x.iter())
            .map(|(w, v)| w * v)
            .sum::<f64>()
            + bias;
        let residual = sigmoid(z) - y;
        for (g, v) in gw.iter_mut().zip(x.iter()) {
            *g += residual * v;
        }
        gb += residual;
    }
    gw.iter_mut().for_each(|g| *g /= n);
    (gw, gb / n)
}

/// Per-step diagnostics recorded during training.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    pub learning_rates: Vec<f64>,
    pub grad_norms: Vec<f64>,
    pub clipped_grad_norms: Vec<f64>,
}

pub fn train(
    samples: &[&Sample],
    cfg: &ClassifierConfig,
    table: &EmbeddingTable,
) -> Result<TrainedModel> {
    train_with_trace(samples, cfg, table).map(|(m, _)| m)
}

/// Trains the baseline and returns the per-step trace alongside it.
pub fn train_with_trace(
    samples: &[&Sample],
    cfg: &ClassifierConfig,
    table: &EmbeddingTable,
) -> Result<(TrainedModel, TrainTrace)> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::Training("training split is empty".into()));
    }
    let positives = samples.iter().filter(|s| s.label.is_positive()).count();
    if positives == 0 || positives == samples.len() {
        return Err(Error::Training(
            "training data must contain both classes".into(),
        ));
    }
    let features: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| featurize(&s.text, table, cfg.max_seq_length))
        .collect();
    let targets: Vec<f64> = samples
        .iter()
        .map(|s| if s.label.is_positive() { 1.0 } else { 0.0 })
        .collect();
    let fingerprint = training_fingerprint(cfg, samples, table.dim());
    train_on_features(&features, &targets, cfg, fingerprint)
}

/// Training loop over precomputed feature vectors.
pub fn train_on_features(
    features: &[Vec<f64>],
    targets: &[f64],
    cfg: &ClassifierConfig,
    fingerprint: String,
) -> Result<(TrainedModel, TrainTrace)> {
    cfg.validate()?;
    let dim = features.first().map_or(0, Vec::len);
    let mut model = TrainedModel::zeros(dim, fingerprint);
    let mut trace = TrainTrace::default();
    if cfg.num_train_epochs == 0 {
        warn!("num_train_epochs = 0; returning the zero-initialized model");
        return Ok((model, trace));
    }

    let n = features.len();
    let steps_per_epoch = n.div_ceil(cfg.train_batch_size);
    let schedule = LrSchedule::new(
        cfg.learning_rate,
        cfg.warmup_ratio,
        steps_per_epoch * cfg.num_train_epochs,
    );
    let mut order: Vec<usize> = (0..n).collect();
    let mut step = 0usize;
    for epoch in 0..cfg.num_train_epochs {
        order.sort_unstable();
        order.shuffle(&mut derived_rng(
            cfg.manual_seed,
            &["epoch".into(), epoch.into()],
        ));
        for batch in order.chunks(cfg.train_batch_size) {
            let xs: Vec<&[f64]> = batch.iter().map(|&i| features[i].as_slice()).collect();
            let ys: Vec<f64> = batch.iter().map(|&i| targets[i]).collect();
            let (mut gw, mut gb) = batch_gradient(&model.weights, model.bias, &xs, &ys);

            let norm = (gw.iter().map(|g| g * g).sum::<f64>() + gb * gb).sqrt();
            let mut clipped = norm;
            if norm > cfg.max_grad_norm {
                let scale = cfg.max_grad_norm / norm;
                gw.iter_mut().for_each(|g| *g *= scale);
                gb *= scale;
                clipped = (gw.iter().map(|g| g * g).sum::<f64>() + gb * gb).sqrt();
            }

            let lr = schedule.rate(step);
            for (w, g) in model.weights.iter_mut().zip(&gw) {
                *w -= lr * cfg.weight_decay * *w;
                *w -= lr * g;
            }
            model.bias -= lr * gb;

            trace.learning_rates.push(lr);
            trace.grad_norms.push(norm);
            trace.clipped_grad_norms.push(clipped);
            step += 1;
        }
    }
    if model.weights.iter().any(|w| !w.is_finite()) || !model.bias.is_finite() {
        return Err(Error::Training(
            "training diverged to non-finite parameters".into(),
        ));
    }
    Ok((model, trace))
}

/// Hash of the configuration, the training texts and labels, and the dim.
pub fn training_fingerprint(cfg: &ClassifierConfig, samples: &[&Sample], dim: usize) -> String {
    let mut bytes = serde_json::to_vec(cfg).expect("config serializes");
    bytes.extend_from_slice(&(dim as u64).to_le_bytes());
    for s in samples {
        bytes.extend_from_slice(s.text.as_bytes());
        bytes.push(0);
        bytes.push(s.label.is_positive() as u8);
    }
    short_digest(&bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub score: f64,
}

/// `sigmoid(w·x + b)`; positive when the score is at least 0.5.
pub fn predict(
    model: &TrainedModel,
    text: &str,
    table: &EmbeddingTable,
    max_seq_length: usize,
) -> Result<Prediction> {
    if model.dim != table.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim,
            actual: table.dim(),
        });
    }
    let features = featurize(text, table, max_seq_length);
    Ok(predict_features(model, &features))
}

pub fn predict_features(model: &TrainedModel, features: &[f64]) -> Prediction {
    let score = sigmoid(model.logit(features));
    let label = if score >= 0.5 {
        Label::Sarcastic
    } else {
        Label::NotSarcastic
    };
    Prediction { label, score }
}

/// Metadata written next to an export so external jobs can be reproduced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportManifest {
    pub dataset: String,
    pub files: Vec<ExportFile>,
    pub total: usize,
    /// Path (relative to the export directory) of an augmentation report.
    #[serde(default)]
    pub augmentation_report: Option<String>,
    pub config_fingerprint: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportFile {
    pub split: Split,
    pub path: String,
    pub count: usize,
}

/// Provenance recorded in an [`ExportManifest`].
#[derive(Debug, Clone, Default)]
pub struct ExportInfo {
    pub augmentation_report: Option<String>,
    pub config_fingerprint: String,
    pub seed: u64,
}

/// Writes `train.jsonl`, `val.jsonl`, `test.jsonl` and `manifest.json` under `dir`.
pub fn export_for_external_trainer(
    d: &Dataset,
    dir: impl AsRef<Path>,
    info: &ExportInfo,
) -> Result<ExportManifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::write(dir, e))?;
    let mut files = Vec::new();
    for split in Split::ALL {
        let entries: Vec<(&Sample, Split)> = d.entries().filter(|(_, sp)| *sp == split).collect();
        let name = format!("{split}.jsonl");
        write_entries(&entries, &dir.join(&name), DataFormat::Jsonl)?;
        files.push(ExportFile {
            split,
            path: name,
            count: entries.len(),
        });
    }
    let manifest = ExportManifest {
        dataset: d.name().to_string(),
        files,
        total: d.len(),
        augmentation_report: info.augmentation_report.clone(),
        config_fingerprint: info.config_fingerprint.clone(),
        seed: info.seed,
    };
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(&path, json + "\n").map_err(|e| Error::write(&path, e))?;
    Ok(manifest)
}

/// Reloads an export directory as one dataset, splits taken from the files.
pub fn load_export(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::read(&path, e))?;
    let manifest: ExportManifest = serde_json::from_str(&text)?;
    let mut entries = Vec::new();
    for file in &manifest.files {
        let p: PathBuf = dir.join(&file.path);
        let part = crate::corpus::load_dataset_named(
            &p,
            DataFormat::Jsonl,
            &format!("{}.{}", manifest.dataset, file.split),
        )?;
        entries.extend(part.owned_entries());
    }
    Dataset::new(manifest.dataset, entries)
}
