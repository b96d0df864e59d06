//! Dataset × augmentation-level sweeps, result persistence and report tables.
//!
//! Results directory layout:
//!
//! ```text
//! <output_dir>/
//!   manifest.json              cells, failures and plan fingerprint
//!   runs/<dataset>/<level>.json        one RunResult per cell
//!   runs/<dataset>/<level>.model.json  the trained classifier
//! ```
//!
//! With `replicates > 1` the file stems become `<level>-r<k>`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augment::{AugmentPolicy, AugmentReport, Augmenter};
use crate::classify::{self, ClassifierConfig};
use crate::corpus::{self, DataFormat, Dataset, Label, Split};
use crate::embeddings::{self, EmbeddingTable};
use crate::error::{Error, Result};
use crate::metrics::{compare_runs, FScoreMode, MetricSet};
use crate::preprocess::{preprocess_dataset, PipelineConfig};
use crate::seed::{derive_seed, short_digest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRef {
    pub name: String,
    pub path: PathBuf,
    /// Inferred from the extension when absent.
    #[serde(default)]
    pub format: Option<DataFormat>,
}

fn one() -> usize {
    1
}

/// JSON plan for [`run_experiment`]. Relative paths resolve against the plan file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub datasets: Vec<DatasetRef>,
    /// Increase percentages; 0 is the non-augmented control.
    pub levels: Vec<f64>,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    /// `increase_pct` and `seed` are replaced per cell.
    #[serde(default)]
    pub augment: AugmentPolicy,
    /// Chosen from the train size of each dataset when absent.
    #[serde(default)]
    pub classifier: Option<ClassifierConfig>,
    pub embeddings: PathBuf,
    #[serde(default)]
    pub master_seed: u64,
    /// Independent augmentation seeds per (dataset, level).
    #[serde(default = "one")]
    pub replicates: usize,
    pub output_dir: PathBuf,
    /// Worker threads; all cores when absent.
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub f_score_mode: FScoreMode,
}

impl ExperimentPlan {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
        let mut plan: ExperimentPlan = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        plan.datasets.iter_mut().for_each(|d| resolve(&mut d.path));
        resolve(&mut plan.embeddings);
        resolve(&mut plan.output_dir);
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::Config(
                "datasets: at least one dataset is required".into(),
            ));
        }
        let mut names = std::collections::HashSet::new();
        for d in &self.datasets {
            if !names.insert(d.name.as_str()) {
                return Err(Error::Config(format!(
                    "datasets: duplicate name {:?}",
                    d.name
                )));
            }
            if d.name.is_empty() || d.name.contains(['/', '\\']) {
                return Err(Error::Config(format!(
                    "datasets: invalid name {:?}",
                    d.name
                )));
            }
        }
        if self.levels.is_empty() {
            return Err(Error::Config(
                "levels: at least one level is required".into(),
            ));
        }
        for (i, l) in self.levels.iter().enumerate() {
            if !(l.is_finite() && *l >= 0.0) {
                return Err(Error::Config(format!(
                    "levels[{i}]: {l} is not a non-negative number"
                )));
            }
            if self.levels[..i].contains(l) {
                return Err(Error::Config(format!("levels[{i}]: duplicate level {l}")));
            }
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates: must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads: must be at least 1".into()));
        }
        self.pipeline.validate()?;
        if let Some(c) = &self.classifier {
            c.validate()?;
        }
        AugmentPolicy {
            increase_pct: 1.0,
            ..self.augment.clone()
        }
        .validate()
    }

    /// Levels in ascending order, the control first.
    pub fn sorted_levels(&self) -> Vec<f64> {
        let mut v = self.levels.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Hash of everything that influences results, paths excluded.
    pub fn fingerprint(&self) -> String {
        let shape = serde_json::json!({
            "datasets": self.datasets.iter().map(|d| &d.name).collect::<Vec<_>>(),
            "levels": self.levels,
            "pipeline": self.pipeline,
            "augment": self.augment,
            "classifier": self.classifier,
            "master_seed": self.master_seed,
            "replicates": self.replicates,
            "f_score_mode": self.f_score_mode,
        });
        short_digest(shape.to_string().as_bytes())
    }
}

/// `10.0` → `"10"`, `12.5` → `"12.5"`.
pub fn level_label(level: f64) -> String {
    if level.fract() == 0.0 {
        format!("{level:.0}")
    } else {
        format!("{level}")
    }
}

/// Per-cell seed; adding levels or datasets never moves existing cells.
pub fn cell_seed(master: u64, dataset: &str, level: f64, replicate: usize) -> u64 {
    derive_seed(
        master,
        &[
            dataset.into(),
            level_label(level).as_str().into(),
            replicate.into(),
        ],
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub dataset: String,
    pub level: f64,
    #[serde(default)]
    pub replicate: usize,
    pub metrics: MetricSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augmentation: Option<AugmentReport>,
    pub config_fingerprint: String,
    pub seed: u64,
    /// Not persisted, so result files stay byte-reproducible.
    #[serde(skip)]
    pub duration: Duration,
    /// Paths relative to the results directory.
    #[serde(default)]
    pub artifacts: Vec<String>,
}

impl RunResult {
    /// A cell carrying externally reported scores only.
    pub fn published(dataset: &str, level: f64, f_score: f64, mcc: f64) -> Self {
        RunResult {
            dataset: dataset.to_string(),
            level,
            replicate: 0,
            metrics: MetricSet::from_published(f_score, mcc),
            augmentation: None,
            config_fingerprint: String::new(),
            seed: 0,
            duration: Duration::ZERO,
            artifacts: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub dataset: String,
    pub level: f64,
    pub replicate: usize,
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub plan_fingerprint: String,
    pub results: Vec<String>,
    pub failures: Vec<CellFailure>,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutcome {
    pub results: Vec<RunResult>,
    pub failures: Vec<CellFailure>,
}

impl ExperimentOutcome {
    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty()
    }
}

struct Cell<'a> {
    dataset: &'a Dataset,
    level: f64,
    replicate: usize,
}

fn stem(level: f64, replicate: usize, replicates: usize) -> String {
    if replicates == 1 {
        level_label(level)
    } else {
        format!("{}-r{replicate}", level_label(level))
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, bytes).map_err(|e| Error::write(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::write(path, e))
}

/// Loads, cleans and deduplicates the datasets, then merges train and val.
/// Datasets that fail to load come back as errors in plan order.
pub fn prepare_datasets(
    plan: &ExperimentPlan,
) -> Result<Vec<std::result::Result<Dataset, (String, Error)>>> {
    let pipeline = plan.pipeline.build()?;
    let mut staged = Vec::new();
    for r in &plan.datasets {
        let loaded = (|| {
            let format = match r.format {
                Some(f) => f,
                None => DataFormat::from_path(&r.path).ok_or_else(|| {
                    Error::Config(format!(
                        "datasets.{}: cannot infer format of {}",
                        r.name,
                        r.path.display()
                    ))
                })?,
            };
            let d = corpus::load_dataset_named(&r.path, format, &r.name)?;
            let (d, report) = preprocess_dataset(&d, &pipeline)?;
            if !report.emptied.is_empty() {
                info!(
                    "{}: {} samples emptied by preprocessing",
                    r.name,
                    report.emptied.len()
                );
            }
            Ok(d)
        })();
        staged.push(loaded.map_err(|e: Error| (r.name.clone(), e)));
    }
    let ok: Vec<Dataset> = staged
        .iter()
        .filter_map(|s| s.as_ref().ok().cloned())
        .collect();
    let (deduped, report) = corpus::dedup(&ok);
    if !report.is_empty() {
        info!("dedup dropped {} samples", report.dropped.len());
    }
    let mut deduped = deduped.into_iter();
    Ok(staged
        .into_iter()
        .map(|s| {
            s.map(|_| corpus::merge_train_val(&deduped.next().expect("one per loaded dataset")))
        })
        .collect())
}

fn run_cell(
    plan: &ExperimentPlan,
    cell: &Cell<'_>,
    table: &EmbeddingTable,
) -> std::result::Result<(RunResult, classify::TrainedModel), (String, Error)> {
    let started = Instant::now();
    let name = cell.dataset.name();
    let seed = cell_seed(plan.master_seed, name, cell.level, cell.replicate);
    let (data, augmentation) = if cell.level > 0.0 {
        let policy = AugmentPolicy {
            increase_pct: cell.level,
            seed,
            ..plan.augment.clone()
        };
        let stopwords = plan
            .pipeline
            .build()
            .map_err(|e| ("augment".to_string(), e))?
            .stopwords;
        let (d, rep) = Augmenter::new(table, policy, stopwords)
            .and_then(|a| a.augment_class(cell.dataset))
            .map_err(|e| ("augment".to_string(), e))?;
        (d, Some(rep))
    } else {
        (cell.dataset.clone(), None)
    };

    let train: Vec<&corpus::Sample> = data.split(Split::Train).collect();
    let cfg = plan
        .classifier
        .clone()
        .unwrap_or_else(|| ClassifierConfig::for_train_size(cell.dataset.count(Split::Train)));
    let model = classify::train(&train, &cfg, table).map_err(|e| ("train".to_string(), e))?;

    let val: Vec<&corpus::Sample> = data.split(Split::Val).collect();
    if val.is_empty() {
        return Err((
            "evaluate".into(),
            Error::Evaluation(format!("{name}: evaluation split is empty")),
        ));
    }
    let mut preds = Vec::with_capacity(val.len());
    for s in &val {
        let p = classify::predict(&model, &s.text, table, cfg.max_seq_length)
            .map_err(|e| ("evaluate".to_string(), e))?;
        preds.push(p.label);
    }
    let gold: Vec<Label> = val.iter().map(|s| s.label).collect();
    let metrics = MetricSet::from_labels(&preds, &gold, plan.f_score_mode)
        .map_err(|e| ("evaluate".to_string(), e))?;

    let stem = stem(cell.level, cell.replicate, plan.replicates);
    let result = RunResult {
        dataset: name.to_string(),
        level: cell.level,
        replicate: cell.replicate,
        metrics,
        augmentation,
        config_fingerprint: model.config_fingerprint.clone(),
        seed,
        duration: started.elapsed(),
        artifacts: vec![
            format!("runs/{name}/{stem}.json"),
            format!("runs/{name}/{stem}.model.json"),
        ],
    };
    Ok((result, model))
}

/// Runs every (dataset, level, replicate) cell and persists the results.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentOutcome> {
    plan.validate()?;
    let table = embeddings::load_embeddings(&plan.embeddings)?;
    run_experiment_with_table(plan, &table)
}

/// [`run_experiment`] with an already loaded embedding table.
pub fn run_experiment_with_table(
    plan: &ExperimentPlan,
    table: &EmbeddingTable,
) -> Result<ExperimentOutcome> {
    plan.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = plan.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("threads: {e}")))?;
    pool.install(|| run_in_pool(plan, table))
}

fn run_in_pool(plan: &ExperimentPlan, table: &EmbeddingTable) -> Result<ExperimentOutcome> {
    let prepared = prepare_datasets(plan)?;
    let levels = plan.sorted_levels();
    let mut outcome = ExperimentOutcome::default();
    let mut cells = Vec::new();
    for p in &prepared {
        match p {
            Ok(d) => {
                for &level in &levels {
                    for replicate in 0..plan.replicates {
                        cells.push(Cell {
                            dataset: d,
                            level,
                            replicate,
                        });
                    }
                }
            }
            Err((name, e)) => {
                warn!("{name}: {e}");
                for &level in &levels {
                    for replicate in 0..plan.replicates {
                        outcome.failures.push(CellFailure {
                            dataset: name.clone(),
                            level,
                            replicate,
                            stage: "load".into(),
                            message: e.to_string(),
                        });
                    }
                }
            }
        }
    }

    let runs: Vec<_> = cells.par_iter().map(|c| run_cell(plan, c, table)).collect();

    let out = &plan.output_dir;
    for (cell, run) in cells.iter().zip(runs) {
        match run {
            Ok((result, model)) => {
                let dir = out.join("runs").join(&result.dataset);
                fs::create_dir_all(&dir).map_err(|e| Error::write(&dir, e))?;
                let json = serde_json::to_string_pretty(&result)? + "\n";
                write_atomic(&out.join(&result.artifacts[0]), json.as_bytes())?;
                model.save(out.join(&result.artifacts[1]))?;
                info!(
                    "{} @ {}%: F {:.4} MCC {:.4} ({:.2?})",
                    result.dataset,
                    result.level,
                    result.metrics.f_score,
                    result.metrics.mcc,
                    result.duration
                );
                outcome.results.push(result);
            }
            Err((stage, e)) => {
                warn!(
                    "{} @ {}%: {stage} failed: {e}",
                    cell.dataset.name(),
                    cell.level
                );
                outcome.failures.push(CellFailure {
                    dataset: cell.dataset.name().to_string(),
                    level: cell.level,
                    replicate: cell.replicate,
                    stage,
                    message: e.to_string(),
                });
            }
        }
    }

    let manifest = Manifest {
        plan_fingerprint: plan.fingerprint(),
        results: outcome
            .results
            .iter()
            .map(|r| r.artifacts[0].clone())
            .collect(),
        failures: outcome.failures.clone(),
    };
    fs::create_dir_all(out).map_err(|e| Error::write(out, e))?;
    let json = serde_json::to_string_pretty(&manifest)? + "\n";
    write_atomic(&out.join("manifest.json"), json.as_bytes())?;
    Ok(outcome)
}

/// Reads the results listed in `<dir>/manifest.json`.
pub fn load_results(dir: impl AsRef<Path>) -> Result<(Vec<RunResult>, Manifest)> {
    let dir = dir.as_ref();
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::read(&path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let mut results = Vec::with_capacity(manifest.results.len());
    for rel in &manifest.results {
        let p = dir.join(rel);
        let text = fs::read_to_string(&p).map_err(|e| Error::read(&p, e))?;
        results.push(serde_json::from_str(&text)?);
    }
    Ok((results, manifest))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Markdown,
    Csv,
    /// Tab-separated, laid out like a printed results table.
    Tsv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "tsv" => Ok(ReportFormat::Tsv),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

/// Mean F-score and MCC per (dataset, level), datasets in first-seen order.
pub struct ResultGrid {
    pub datasets: Vec<String>,
    pub levels: Vec<f64>,
    cells: BTreeMap<(usize, usize), (f64, f64)>,
}

impl ResultGrid {
    pub fn new(results: &[RunResult]) -> Self {
        let mut datasets: Vec<String> = Vec::new();
        let mut levels: Vec<f64> = Vec::new();
        for r in results {
            if !datasets.contains(&r.dataset) {
                datasets.push(r.dataset.clone());
            }
            if !levels.contains(&r.level) {
                levels.push(r.level);
            }
        }
        levels.sort_by(f64::total_cmp);
        let mut sums: BTreeMap<(usize, usize), (f64, f64, usize)> = BTreeMap::new();
        for r in results {
            let key = (
                datasets.iter().position(|d| *d == r.dataset).unwrap(),
                levels.iter().position(|l| *l == r.level).unwrap(),
            );
            let e = sums.entry(key).or_insert((0.0, 0.0, 0));
            e.0 += r.metrics.f_score;
            e.1 += r.metrics.mcc;
            e.2 += 1;
        }
        let cells = sums
            .into_iter()
            .map(|(k, (f, m, n))| (k, (f / n as f64, m / n as f64)))
            .collect();
        ResultGrid {
            datasets,
            levels,
            cells,
        }
    }

    /// Mean (F-score, MCC) of a cell.
    pub fn get(&self, dataset: &str, level: f64) -> Option<(f64, f64)> {
        let d = self.datasets.iter().position(|x| x == dataset)?;
        let l = self.levels.iter().position(|x| *x == level)?;
        self.cells.get(&(d, l)).copied()
    }

    fn value(&self, d: usize, l: usize, mcc: bool) -> String {
        match self.cells.get(&(d, l)) {
            Some((f, m)) => format!("{:.4}", if mcc { m } else { f }),
            None => "-".into(),
        }
    }
}

pub fn level_header(level: f64) -> String {
    if level == 0.0 {
        "Non-augmented".into()
    } else {
        format!("{}% augmented", level_label(level))
    }
}

/// F-score and MCC tables, one row per dataset and one column per level.
/// With `deltas`, adds the point change of each level against level 0.
pub fn emit_report(results: &[RunResult], format: ReportFormat, deltas: bool) -> String {
    let grid = ResultGrid::new(results);
    let mut out = String::new();
    let metrics = [("F - Score", false), ("MCC", true)];
    let headers: Vec<String> = grid.levels.iter().map(|l| level_header(*l)).collect();
    match format {
        ReportFormat::Tsv => {
            for (i, (title, mcc)) in metrics.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                let _ = writeln!(
                    out,
                    "Dataset\t{title}{}",
                    "\t".repeat(grid.levels.len().saturating_sub(1))
                );
                let _ = writeln!(out, "\t{}", headers.join("\t"));
                for (d, name) in grid.datasets.iter().enumerate() {
                    let row: Vec<String> = (0..grid.levels.len())
                        .map(|l| grid.value(d, l, *mcc))
                        .collect();
                    let _ = writeln!(out, "{name}\t{}", row.join("\t"));
                }
            }
        }
        ReportFormat::Markdown => {
            for (i, (title, mcc)) in metrics.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                let _ = writeln!(out, "### {title}\n");
                let _ = writeln!(out, "| Dataset | {} |", headers.join(" | "));
                let _ = writeln!(out, "|---|{}", "---:|".repeat(headers.len()));
                for (d, name) in grid.datasets.iter().enumerate() {
                    let row: Vec<String> = (0..grid.levels.len())
                        .map(|l| grid.value(d, l, *mcc))
                        .collect();
                    let _ = writeln!(out, "| {name} | {} |", row.join(" | "));
                }
            }
        }
        ReportFormat::Csv => {
            let _ = writeln!(out, "metric,dataset,{}", headers.join(","));
            for (_, mcc) in metrics {
                let key = if mcc { "mcc" } else { "f_score" };
                for (d, name) in grid.datasets.iter().enumerate() {
                    let row: Vec<String> = (0..grid.levels.len())
                        .map(|l| grid.value(d, l, mcc))
                        .collect();
                    let _ = writeln!(out, "{key},{},{}", csv_field(name), row.join(","));
                }
            }
        }
    }
    if deltas {
        out.push_str(&delta_table(&grid, format));
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn delta_table(grid: &ResultGrid, format: ReportFormat) -> String {
    let mut out = String::new();
    let Some(base) = grid.levels.iter().position(|l| *l == 0.0) else {
        warn!("no level 0 results; skipping the delta table");
        return out;
    };
    let treated: Vec<usize> = (0..grid.levels.len()).filter(|l| *l != base).collect();
    let headers: Vec<String> = treated
        .iter()
        .map(|l| level_header(grid.levels[*l]))
        .collect();
    let row = |d: usize, mcc: bool| -> Vec<String> {
        treated
            .iter()
            .map(
                |&l| match (grid.cells.get(&(d, base)), grid.cells.get(&(d, l))) {
                    (Some(b), Some(t)) => {
                        let delta = compare_runs(
                            &MetricSet::from_published(b.0, b.1),
                            &MetricSet::from_published(t.0, t.1),
                        );
                        format!(
                            "{:+.1}",
                            if mcc {
                                delta.mcc_points
                            } else {
                                delta.f_score_points
                            }
                        )
                    }
                    _ => "-".into(),
                },
            )
            .collect()
    };
    for (title, mcc) in [
        ("F - Score change (points)", false),
        ("MCC change (points)", true),
    ] {
        match format {
            ReportFormat::Markdown => {
                let _ = writeln!(out, "\n### {title}\n");
                let _ = writeln!(out, "| Dataset | {} |", headers.join(" | "));
                let _ = writeln!(out, "|---|{}", "---:|".repeat(headers.len()));
                for (d, name) in grid.datasets.iter().enumerate() {
                    let _ = writeln!(out, "| {name} | {} |", row(d, mcc).join(" | "));
                }
            }
            ReportFormat::Tsv => {
                let _ = writeln!(
                    out,
                    "\nDataset\t{title}{}",
                    "\t".repeat(headers.len().saturating_sub(1))
                );
                let _ = writeln!(out, "\t{}", headers.join("\t"));
                for (d, name) in grid.datasets.iter().enumerate() {
                    let _ = writeln!(out, "{name}\t{}", row(d, mcc).join("\t"));
                }
            }
            ReportFormat::Csv => {
                let key = if mcc { "mcc_points" } else { "f_score_points" };
                if !mcc {
                    let _ = writeln!(out, "\nmetric,dataset,{}", headers.join(","));
                }
                for (d, name) in grid.datasets.iter().enumerate() {
                    let _ = writeln!(out, "{key},{},{}", csv_field(name), row(d, mcc).join(","));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_labels() {
        assert_eq!(level_label(0.0), "0");
        assert_eq!(level_label(20.0), "20");
        assert_eq!(level_label(12.5), "12.5");
        assert_eq!(level_header(0.0), "Non-augmented");
        assert_eq!(level_header(30.0), "30% augmented");
    }

    #[test]
    fn single_result_is_one_by_one() {
        let r = [RunResult::published("only", 0.0, 0.5, 0.25)];
        let md = emit_report(&r, ReportFormat::Markdown, false);
        assert!(md.contains("| Dataset | Non-augmented |"));
        assert!(md.contains("| only | 0.5000 |"));
        assert!(md.contains("| only | 0.2500 |"));
        let csv = emit_report(&r, ReportFormat::Csv, false);
        assert_eq!(
            csv,
            "metric,dataset,Non-augmented\nf_score,only,0.5000\nmcc,only,0.2500\n"
        );
    }

    #[test]
    fn identical_runs_give_zero_deltas() {
        let r = [
            RunResult::published("d", 0.0, 0.61, 0.3),
            RunResult::published("d", 10.0, 0.61, 0.3),
        ];
        let csv = emit_report(&r, ReportFormat::Csv, true);
        assert!(csv.contains("f_score_points,d,+0.0"));
        assert!(csv.contains("mcc_points,d,+0.0"));
    }

    #[test]
    fn replicates_are_averaged() {
        let mut a = RunResult::published("d", 20.0, 0.5, 0.1);
        let mut b = RunResult::published("d", 20.0, 0.6, 0.2);
        a.replicate = 0;
        b.replicate = 1;
        let g = ResultGrid::new(&[a, b]);
        let (f, m) = g.get("d", 20.0).unwrap();
        assert!((f - 0.55).abs() < 1e-12 && (m - 0.15).abs() < 1e-12);
    }

    #[test]
    fn cell_seeds_are_independent_of_other_cells() {
        let s = cell_seed(1, "a", 10.0, 0);
        assert_eq!(s, cell_seed(1, "a", 10.0, 0));
        assert_ne!(s, cell_seed(1, "a", 20.0, 0));
        assert_ne!(s, cell_seed(1, "b", 10.0, 0));
        assert_ne!(s, cell_seed(1, "a", 10.0, 1));
    }

    #[test]
    fn plan_validation_names_field() {
        let plan: ExperimentPlan = serde_json::from_value(serde_json::json!({
            "datasets": [{"name": "a", "path": "a.csv"}, {"name": "a", "path": "b.csv"}],
            "levels": [0, 10],
            "embeddings": "e.txt",
            "output_dir": "out"
        }))
        .unwrap();
        let err = plan.validate().unwrap_err().to_string();
        assert!(err.contains("datasets"), "{err}");

        let bad: std::result::Result<ExperimentPlan, _> =
            serde_json::from_value(serde_json::json!({
                "datasets": [], "levels": [0], "embeddings": "e", "output_dir": "o", "levls": 1
            }));
        assert!(bad.unwrap_err().to_string().contains("levls"));
    }
}
