//! Prints cosine nearest neighbors from an embedding file.
//!
//! ```sh
//! cargo run --example nearest_neighbors -- [embeddings.txt] [word ...]
//! ```

use embaug::embeddings::load_embeddings;

fn main() -> embaug::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/data/fixtures/embeddings-d10.txt"
        )
        .into()
    });
    let mut words: Vec<String> = args.collect();
    if words.is_empty() {
        words = ["love", "monday", "great"].map(String::from).to_vec();
    }
    let table = load_embeddings(&path)?;
    println!("{} words, dim {}", table.len(), table.dim());
    for w in &words {
        match table.nearest_neighbors(w, 5, 0.0) {
            Ok(ns) => {
                let shown: Vec<String> = ns
                    .iter()
                    .map(|n| format!("{} ({:.3})", n.word, n.similarity))
                    .collect();
                println!("{w}: {}", shown.join(", "));
            }
            Err(e) => println!("{w}: {e}"),
        }
    }
    Ok(())
}
