//! Trains the baseline classifier on the synthetic corpus and scores the
//! held-out split.
//!
//! ```sh
//! cargo run --release --example train_baseline
//! ```

use embaug::classify::{predict, train, ClassifierConfig};
use embaug::corpus::{load_dataset, merge_train_val, DataFormat, Split};
use embaug::embeddings::load_embeddings;
use embaug::metrics::{FScoreMode, MetricSet};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixtures");

fn main() -> embaug::Result<()> {
    let table = load_embeddings(format!("{FIXTURES}/embeddings-d10.txt"))?;
    let d = merge_train_val(&load_dataset(
        format!("{FIXTURES}/synthetic-imbalanced.csv"),
        DataFormat::Csv,
    )?);
    let train_set: Vec<_> = d.split(Split::Train).collect();
    let cfg = ClassifierConfig::for_train_size(train_set.len());
    let model = train(&train_set, &cfg, &table)?;
    let held: Vec<_> = d.split(Split::Val).collect();
    let preds = held
        .iter()
        .map(|s| predict(&model, &s.text, &table, cfg.max_seq_length).map(|p| p.label))
        .collect::<embaug::Result<Vec<_>>>()?;
    let gold: Vec<_> = held.iter().map(|s| s.label).collect();
    let m = MetricSet::from_labels(&preds, &gold, FScoreMode::Positive)?;
    println!("train {} / held-out {}", train_set.len(), held.len());
    println!(
        "{}",
        serde_json::to_string_pretty(&m).expect("metrics serialize")
    );
    Ok(())
}
