//! Grows the sarcastic training class of the augmentation fixture by 10, 20
//! and 30 percent and shows a few generated sentences.
//!
//! ```sh
//! cargo run --example augment_minority
//! ```

use embaug::augment::{augment_class, AugmentPolicy};
use embaug::corpus::{load_dataset, DataFormat, Origin};
use embaug::embeddings::load_embeddings;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixtures");

fn main() -> embaug::Result<()> {
    let table = load_embeddings(format!("{FIXTURES}/embeddings-d10.txt"))?;
    let d = load_dataset(format!("{FIXTURES}/augfix.csv"), DataFormat::Csv)?;
    for pct in [10.0, 20.0, 30.0] {
        let policy = AugmentPolicy {
            increase_pct: pct,
            seed: 1,
            ..Default::default()
        };
        let (out, rep) = augment_class(&d, &table, &policy)?;
        println!(
            "{pct}%: {}",
            serde_json::to_string(&rep).expect("report serializes")
        );
        for s in out
            .samples()
            .iter()
            .filter(|s| s.origin == Origin::Augmented)
            .take(3)
        {
            let parent = out
                .get(s.parent_id.as_deref().unwrap_or_default())
                .map(|p| p.text.as_str());
            println!("  {:?} -> {:?}", parent.unwrap_or("?"), s.text);
        }
    }
    Ok(())
}
