//! Cleans a handful of raw tweets with the default pipeline and with a
//! lowercase-only one.
//!
//! ```sh
//! cargo run --example preprocess_tweets
//! ```

use embaug::preprocess::{Pipeline, PipelineConfig};

const TWEETS: [&str; 4] = [
    "I just LOVE waiting 3 hours at the DMV!!! #blessed @dmv https://t.co/xyz",
    "can't wait for monday morning meetings 🙃🙃",
    "Great, my phone died [again] right before the call...",
    "RT @someone: ur gonna love this, it's sooo good",
];

fn main() -> embaug::Result<()> {
    let full = Pipeline::default();
    let light = PipelineConfig::lowercase_only().build()?;
    for t in TWEETS {
        println!("raw:   {t}");
        println!("clean: {}", full.run(t));
        println!("lower: {}\n", light.run(t));
    }
    Ok(())
}
