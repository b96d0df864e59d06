//! Regenerates the synthetic corpora under `data/fixtures/`.
//!
//! ```sh
//! cargo run --example generate_fixtures [OUT_DIR]
//! ```

use std::path::PathBuf;

use embaug::corpus::{save_dataset, DataFormat};
use embaug::synthetic::{
    augmentation_fixture, imbalanced_corpus, tiny_fixture, ImbalancedSpec, IMBALANCED_SEED,
};

fn main() -> embaug::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fixtures"));
    std::fs::create_dir_all(&out).map_err(|e| embaug::Error::Write {
        path: out.clone(),
        source: e,
    })?;

    let syn = imbalanced_corpus("synthetic", IMBALANCED_SEED, &ImbalancedSpec::default());
    save_dataset(&syn, out.join("synthetic-imbalanced.csv"), DataFormat::Csv)?;
    save_dataset(
        &augmentation_fixture(),
        out.join("augfix.csv"),
        DataFormat::Csv,
    )?;
    let tiny = tiny_fixture();
    save_dataset(&tiny, out.join("tiny.csv"), DataFormat::Csv)?;
    save_dataset(&tiny, out.join("tiny.jsonl"), DataFormat::Jsonl)?;
    println!("wrote fixtures to {}", out.display());
    Ok(())
}
