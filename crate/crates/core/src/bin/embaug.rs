//! Command-line front end. Exit status: 0 success, 1 partial experiment
//! failure, 2 usage, 3 configuration, 4 input data, 5 filesystem.

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use embaug::augment::{AugmentPolicy, Augmenter};
use embaug::classify::{self, ClassifierConfig, ExportInfo, TrainedModel};
use embaug::corpus::{self, DataFormat, Dataset, Label, Split};
use embaug::embeddings::{load_embeddings, load_embeddings_cached, EmbeddingTable};
use embaug::experiment::{emit_report, load_results, run_experiment, ExperimentPlan, ReportFormat};
use embaug::metrics::{FScoreMode, MetricSet};
use embaug::preprocess::{preprocess_dataset, PipelineConfig, Stopwords};
use embaug::{Error, Result};

#[derive(Parser)]
#[command(
    name = "embaug",
    version,
    about = "Embedding-based augmentation for imbalanced text classification"
)]
struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split sizes and positive-class share of a dataset.
    Stats {
        input: PathBuf,
        #[arg(long)]
        format: Option<DataFormat>,
    },
    /// Normalize, clean and trim every text.
    Preprocess {
        input: PathBuf,
        output: PathBuf,
        /// Pipeline settings as JSON; defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the configured maximum length.
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Grow the target class of the train split.
    Augment {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        emb: EmbeddingArgs,
        /// Increase of the target class, in percent.
        #[arg(long)]
        pct: f64,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        min_sim: f64,
        #[arg(long, default_value_t = 1)]
        words_per_sentence: usize,
        #[arg(long, default_value_t = 10)]
        max_attempts: usize,
        #[arg(long, default_value = "sarcastic")]
        label: Label,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stopword list; the shipped English list by default.
        #[arg(long)]
        stopwords: Option<PathBuf>,
        /// Write the augmentation report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Fit the baseline classifier on the train split.
    Train {
        input: PathBuf,
        #[command(flatten)]
        emb: EmbeddingArgs,
        /// Where to write the model JSON.
        #[arg(long)]
        model: PathBuf,
        /// Classifier settings as JSON; size-based defaults otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides manual_seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        batch_size: Option<usize>,
    },
    /// Score a trained model on one split.
    Evaluate {
        input: PathBuf,
        #[command(flatten)]
        emb: EmbeddingArgs,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "val")]
        split: Split,
        #[arg(long, default_value_t = 40)]
        max_seq_length: usize,
        /// Report macro-averaged F instead of the positive class.
        #[arg(long)]
        macro_f: bool,
    },
    /// Run a dataset × level plan and persist the results.
    Experiment {
        #[arg(long)]
        plan: PathBuf,
        /// Overrides the plan's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the plan's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Render F-score and MCC tables from a results directory.
    Report {
        results: PathBuf,
        #[arg(long, default_value = "markdown")]
        format: ReportFormat,
        /// Add point changes against the non-augmented column.
        #[arg(long)]
        deltas: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write train/val/test JSONL and a manifest for an external trainer.
    Export {
        input: PathBuf,
        dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        augmentation_report: Option<String>,
    },
}

#[derive(Args)]
struct EmbeddingArgs {
    /// Word vectors in whitespace-separated text format.
    #[arg(long)]
    embeddings: PathBuf,
    /// Binary cache next to the vectors, rebuilt when stale.
    #[arg(long)]
    cache: Option<PathBuf>,
}

impl EmbeddingArgs {
    fn load(&self) -> Result<EmbeddingTable> {
        match &self.cache {
            Some(c) => load_embeddings_cached(&self.embeddings, c),
            None => load_embeddings(&self.embeddings),
        }
    }
}

fn load(path: &Path, format: Option<DataFormat>) -> Result<Dataset> {
    let format = match format {
        Some(f) => f,
        None => DataFormat::from_path(path).ok_or_else(|| {
            Error::Config(format!(
                "cannot infer format of {}; use .csv or .jsonl",
                path.display()
            ))
        })?,
    };
    corpus::load_dataset(path, format)
}

fn save(d: &Dataset, path: &Path) -> Result<()> {
    let format = DataFormat::from_path(path).ok_or_else(|| {
        Error::Config(format!(
            "cannot infer format of {}; use .csv or .jsonl",
            path.display()
        ))
    })?;
    corpus::save_dataset(d, path, format)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Read {
        path: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Write {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(Error::Write {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Stats { input, format } => {
            let d = load(&input, format)?;
            let stats = corpus::compute_stats(&d);
            if cli.json {
                print_json(&stats)?;
            } else {
                emit(&format!(
                    "{}\n{}\n",
                    corpus::STATS_HEADER,
                    stats.render_row(d.name())
                ))?;
            }
        }
        Command::Preprocess {
            input,
            output,
            config,
            max_len,
        } => {
            let mut cfg: PipelineConfig = match config {
                Some(p) => read_json(&p)?,
                None => PipelineConfig::default(),
            };
            if let Some(n) = max_len {
                cfg.max_len = n;
            }
            let d = load(&input, None)?;
            let (out, report) = preprocess_dataset(&d, &cfg.build()?)?;
            save(&out, &output)?;
            if cli.json {
                print_json(&report)?;
            } else {
                emit(&format!(
                    "{} samples written, {} emptied, {} orphaned\n",
                    out.len(),
                    report.emptied.len(),
                    report.orphaned.len()
                ))?;
            }
        }
        Command::Augment {
            input,
            output,
            emb,
            pct,
            k,
            min_sim,
            words_per_sentence,
            max_attempts,
            label,
            seed,
            stopwords,
            report,
        } => {
            let policy = AugmentPolicy {
                target_label: label,
                increase_pct: pct,
                words_per_sentence,
                k_candidates: k,
                min_similarity: min_sim,
                seed,
                max_attempts_per_sample: max_attempts,
            };
            policy.validate()?;
            let stopwords = match stopwords {
                Some(p) => Stopwords::load(p)?,
                None => Stopwords::english(),
            };
            let d = load(&input, None)?;
            let table = emb.load()?;
            let (out, rep) = Augmenter::new(&table, policy, stopwords)?.augment_class(&d)?;
            save(&out, &output)?;
            let json = serde_json::to_string_pretty(&rep)? + "\n";
            match report {
                Some(p) => write_text(&p, &json)?,
                None => emit(&json)?,
            }
        }
        Command::Train {
            input,
            emb,
            model,
            config,
            seed,
            epochs,
            batch_size,
        } => {
            let d = load(&input, None)?;
            let mut cfg: ClassifierConfig = match config {
                Some(p) => read_json(&p)?,
                None => ClassifierConfig::for_train_size(d.count(Split::Train)),
            };
            if let Some(s) = seed {
                cfg.manual_seed = s;
            }
            if let Some(e) = epochs {
                cfg.num_train_epochs = e;
            }
            if let Some(b) = batch_size {
                cfg.train_batch_size = b;
            }
            let table = emb.load()?;
            let train: Vec<_> = d.split(Split::Train).collect();
            let m = classify::train(&train, &cfg, &table)?;
            m.save(&model)?;
            if cli.json {
                print_json(&m)?;
            } else {
                emit(&format!(
                    "model written to {} ({})\n",
                    model.display(),
                    m.config_fingerprint
                ))?;
            }
        }
        Command::Evaluate {
            input,
            emb,
            model,
            split,
            max_seq_length,
            macro_f,
        } => {
            let d = load(&input, None)?;
            let table = emb.load()?;
            let m = TrainedModel::load(&model)?;
            let samples: Vec<_> = d.split(split).collect();
            if samples.is_empty() {
                return Err(Error::InvalidDataset(format!(
                    "{}: {split} split is empty",
                    d.name()
                )));
            }
            let mut preds = Vec::with_capacity(samples.len());
            for s in &samples {
                preds.push(classify::predict(&m, &s.text, &table, max_seq_length)?.label);
            }
            let gold: Vec<Label> = samples.iter().map(|s| s.label).collect();
            let mode = if macro_f {
                FScoreMode::Macro
            } else {
                FScoreMode::Positive
            };
            let ms = MetricSet::from_labels(&preds, &gold, mode)?;
            if cli.json {
                print_json(&ms)?;
            } else {
                emit(&format!("{}\n{}\n", MetricSet::CSV_HEADER, ms.csv_row()))?;
            }
        }
        Command::Experiment {
            plan,
            seed,
            out,
            threads,
        } => {
            let mut plan = ExperimentPlan::load(&plan)?;
            if let Some(s) = seed {
                plan.master_seed = s;
            }
            if let Some(o) = out {
                plan.output_dir = o;
            }
            if threads.is_some() {
                plan.threads = threads;
            }
            let outcome = run_experiment(&plan)?;
            if cli.json {
                print_json(&serde_json::json!({
                    "results": outcome.results,
                    "failures": outcome.failures,
                }))?;
            } else {
                emit(&emit_report(
                    &outcome.results,
                    ReportFormat::Markdown,
                    false,
                ))?;
                for f in &outcome.failures {
                    eprintln!(
                        "failed: {} at {}% ({}): {}",
                        f.dataset, f.level, f.stage, f.message
                    );
                }
            }
            if outcome.is_partial() {
                return Ok(1);
            }
        }
        Command::Report {
            results,
            format,
            deltas,
            out,
        } => {
            let (results, _) = load_results(&results)?;
            if results.is_empty() {
                return Err(Error::InvalidDataset(
                    "results directory lists no runs".into(),
                ));
            }
            let text = emit_report(&results, format, deltas);
            match out {
                Some(p) => write_text(&p, &text)?,
                None => emit(&text)?,
            }
        }
        Command::Export {
            input,
            dir,
            seed,
            augmentation_report,
        } => {
            let d = load(&input, None)?;
            let info = ExportInfo {
                augmentation_report,
                config_fingerprint: ClassifierConfig::for_train_size(d.count(Split::Train))
                    .fingerprint(),
                seed,
            };
            let manifest = classify::export_for_external_trainer(&d, &dir, &info)?;
            if cli.json {
                print_json(&manifest)?;
            } else {
                emit(&format!(
                    "exported {} samples to {}\n",
                    manifest.total,
                    dir.display()
                ))?;
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
