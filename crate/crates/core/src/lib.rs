//! Embedding nearest-neighbor augmentation for imbalanced short-text
//! classification.
//!
//! The crate covers the whole desk-scale pipeline:
//!
//! - [`corpus`]: load labeled CSV/JSONL corpora, deduplicate, re-split, summarize.
//! - [`preprocess`]: tweet normalization and cleaning transforms.
//! - [`embeddings`]: GloVe text loader, binary cache and cosine k-NN queries.
//! - [`augment`]: grow the minority class by stochastic neighbor word replacement.
//! - [`classify`]: seeded logistic baseline over mean embeddings, plus export for
//!   external fine-tuning jobs.
//! - [`metrics`]: confusion matrix, F-score, MCC and run-to-run deltas.
//! - [`experiment`]: dataset × augmentation-level sweeps, persisted runs and reports.
//!
//! Runnable walkthroughs for each capability live in the crate's `examples/`
//! directory; the `embaug` binary wraps the same operations as subcommands.

pub mod augment;
pub mod classify;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod preprocess;
pub mod rounding;
pub mod seed;
pub mod synthetic;

pub use error::{Error, Result};
