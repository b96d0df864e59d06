//! Minority-class growth by nearest-neighbor word replacement.
//!
//! A generated sentence copies a training text and swaps up to
//! `words_per_sentence` of its eligible words for one of their `k_candidates`
//! closest embedding neighbors. Only the train split is touched.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, Label, Origin, Sample, Split};
use crate::embeddings::{EmbeddingTable, Neighbor};
use crate::error::{Error, Result};
use crate::preprocess::Stopwords;
use crate::rounding::round_count;
use crate::seed::derived_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentPolicy {
    pub target_label: Label,
    pub increase_pct: f64,
    pub words_per_sentence: usize,
    pub k_candidates: usize,
    pub min_similarity: f64,
    pub seed: u64,
    pub max_attempts_per_sample: usize,
}

impl Default for AugmentPolicy {
    fn default() -> Self {
        AugmentPolicy {
            target_label: Label::Sarcastic,
            increase_pct: 10.0,
            words_per_sentence: 1,
            k_candidates: 5,
            min_similarity: 0.5,
            seed: 0,
            max_attempts_per_sample: 10,
        }
    }
}

impl AugmentPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.increase_pct > 0.0 && self.increase_pct.is_finite()) {
            return Err(Error::Config(
                "augment.increase_pct must be positive".into(),
            ));
        }
        if self.k_candidates == 0 {
            return Err(Error::Config(
                "augment.k_candidates must be at least 1".into(),
            ));
        }
        if self.words_per_sentence == 0 {
            return Err(Error::Config(
                "augment.words_per_sentence must be at least 1".into(),
            ));
        }
        if self.max_attempts_per_sample == 0 {
            return Err(Error::Config(
                "augment.max_attempts_per_sample must be at least 1".into(),
            ));
        }
        if self.min_similarity.is_nan() {
            return Err(Error::Config("augment.min_similarity is NaN".into()));
        }
        Ok(())
    }

    /// Number of samples to generate for `class_count` target-label train samples.
    pub fn requested(&self, class_count: usize) -> usize {
        round_count(self.increase_pct / 100.0 * class_count as f64)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentReport {
    pub requested: usize,
    pub generated: usize,
    /// Generations rejected because the text already existed in train.
    pub rejected_duplicates: usize,
    /// Sources in which no word has an admissible neighbor.
    pub exhausted_sources: usize,
    pub attempts: usize,
}

impl AugmentReport {
    pub fn shortfall(&self) -> usize {
        self.requested - self.generated
    }
}

fn is_alphabetic(word: &str) -> bool {
    !word.is_empty() && word.chars().all(char::is_alphabetic)
}

/// Positions of tokens that are in vocabulary, not stopwords and alphabetic.
pub fn eligible_words(
    tokens: &[&str],
    table: &EmbeddingTable,
    stopwords: &Stopwords,
) -> Vec<usize> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| {
            is_alphabetic(t) && table.contains(t) && !stopwords.contains(&t.to_lowercase())
        })
        .map(|(i, _)| i)
        .collect()
}

/// Replacement engine bound to one table, policy and stopword list.
pub struct Augmenter<'a> {
    table: &'a EmbeddingTable,
    policy: AugmentPolicy,
    stopwords: Stopwords,
}

impl<'a> Augmenter<'a> {
    pub fn new(
        table: &'a EmbeddingTable,
        policy: AugmentPolicy,
        stopwords: Stopwords,
    ) -> Result<Self> {
        policy.validate()?;
        Ok(Augmenter {
            table,
            policy,
            stopwords,
        })
    }

    pub fn policy(&self) -> &AugmentPolicy {
        &self.policy
    }

    /// Alphabetic neighbors of `word` at or above the similarity floor, best first.
    pub fn candidates(&self, word: &str) -> Vec<Neighbor> {
        self.table
            .nearest_neighbors_where(
                word,
                self.policy.k_candidates,
                self.policy.min_similarity,
                is_alphabetic,
            )
            .unwrap_or_default()
    }

    /// One stochastic rewrite of `text`, or `None` when no eligible word has
    /// an admissible neighbor.
    pub fn augment_sentence(&self, text: &str, rng: &mut ChaCha8Rng) -> Option<String> {
        self.rewrite(text, rng, &mut |w: &str| self.candidates(w))
    }

    fn rewrite<F>(&self, text: &str, rng: &mut ChaCha8Rng, pool: &mut F) -> Option<String>
    where
        F: FnMut(&str) -> Vec<Neighbor>,
    {
        let mut tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
        let token_refs: Vec<&str> = tokens.iter().map(String::as_str).collect();
        let mut positions = eligible_words(&token_refs, self.table, &self.stopwords);
        positions.shuffle(rng);
        let mut replaced = 0;
        for pos in positions {
            if replaced == self.policy.words_per_sentence {
                break;
            }
            let options = pool(&tokens[pos]);
            if options.is_empty() {
                continue;
            }
            let pick = rng.gen_range(0..options.len());
            tokens[pos] = options[pick].word.clone();
            replaced += 1;
        }
        (replaced > 0).then(|| tokens.join(" "))
    }

    /// Grows the target class in the train split of `d`.
    pub fn augment_class(&self, d: &Dataset) -> Result<(Dataset, AugmentReport)> {
        let p = &self.policy;
        let sources: Vec<&Sample> = d
            .split(Split::Train)
            .filter(|s| s.label == p.target_label && s.origin == Origin::Original)
            .collect();
        if sources.is_empty() {
            return Err(Error::InvalidDataset(format!(
                "{}: no {} samples in the train split",
                d.name(),
                p.target_label
            )));
        }
        let class_count = d
            .split(Split::Train)
            .filter(|s| s.label == p.target_label)
            .count();
        let mut report = AugmentReport {
            requested: p.requested(class_count),
            ..Default::default()
        };

        // Neighbor pools for every distinct eligible word, computed once.
        let words: Vec<&str> = {
            let mut set = HashSet::new();
            for s in &sources {
                let toks: Vec<&str> = s.text.split_whitespace().collect();
                for i in eligible_words(&toks, self.table, &self.stopwords) {
                    set.insert(toks[i]);
                }
            }
            let mut v: Vec<&str> = set.into_iter().collect();
            v.sort_unstable();
            v
        };
        let pools: HashMap<&str, Vec<Neighbor>> =
            words.par_iter().map(|w| (*w, self.candidates(w))).collect();
        let has_pool = |w: &str| pools.get(w).is_some_and(|v| !v.is_empty());

        let mut order: Vec<&Sample> = Vec::with_capacity(sources.len());
        for s in &sources {
            if s.text.split_whitespace().any(&has_pool) {
                order.push(s);
            } else {
                report.exhausted_sources += 1;
            }
        }
        order.shuffle(&mut derived_rng(
            p.seed,
            &["augment-order".into(), d.name().into()],
        ));

        let mut seen: HashSet<String> = d.split(Split::Train).map(|s| s.text.clone()).collect();
        let mut accepted: Vec<(Sample, Split)> = Vec::new();
        let mut attempt = 0;
        while report.generated < report.requested && attempt < p.max_attempts_per_sample {
            let round: Vec<Option<String>> = order
                .par_iter()
                .map(|s| {
                    let mut rng = derived_rng(p.seed, &[s.id.as_str().into(), attempt.into()]);
                    self.rewrite(&s.text, &mut rng, &mut |w: &str| {
                        pools.get(w).cloned().unwrap_or_default()
                    })
                })
                .collect();
            for (source, generated) in order.iter().zip(round) {
                if report.generated == report.requested {
                    break;
                }
                report.attempts += 1;
                let Some(text) = generated else { continue };
                if !seen.insert(text.clone()) {
                    report.rejected_duplicates += 1;
                    continue;
                }
                let id = format!("{}+aug{attempt}", source.id);
                accepted.push((
                    Sample::augmented(id, text, p.target_label, source.id.clone()),
                    Split::Train,
                ));
                report.generated += 1;
            }
            attempt += 1;
        }
        Ok((d.with_appended(accepted)?, report))
    }
}

/// Convenience wrapper with the shipped English stopwords.
pub fn augment_class(
    d: &Dataset,
    table: &EmbeddingTable,
    policy: &AugmentPolicy,
) -> Result<(Dataset, AugmentReport)> {
    Augmenter::new(table, policy.clone(), Stopwords::english())?.augment_class(d)
}

/// Counts of augmented samples per parent id.
pub fn children_by_parent(d: &Dataset) -> BTreeMap<&str, usize> {
    let mut out = BTreeMap::new();
    for s in d.samples() {
        if let Some(p) = &s.parent_id {
            *out.entry(p.as_str()).or_insert(0) += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    fn fixture() -> EmbeddingTable {
        let text = include_str!("../data/fixtures/embeddings-d10.txt");
        EmbeddingTable::read_text(
            text.as_bytes(),
            std::path::Path::new("fixture"),
            Default::default(),
        )
        .unwrap()
    }

    fn augmenter(table: &EmbeddingTable) -> Augmenter<'_> {
        Augmenter::new(table, AugmentPolicy::default(), Stopwords::english()).unwrap()
    }

    #[test]
    fn eligible_examples() {
        let t = fixture();
        let sw = Stopwords::english();
        assert_eq!(eligible_words(&["the", "good", "day"], &t, &sw), vec![1, 2]);
        assert_eq!(
            eligible_words(&["qqq", "zzz"], &t, &sw),
            Vec::<usize>::new()
        );
        // "the": stopword, "love": ok, "xyzzy": oov, "monday": ok, "not": stopword, "r2d2": not alphabetic
        assert_eq!(
            eligible_words(&["the", "love", "xyzzy", "monday", "not", "r2d2"], &t, &sw),
            vec![1, 3]
        );
    }

    #[test]
    fn good_day_becomes_great_day() {
        let t = fixture();
        let a = augmenter(&t);
        for seed in 0..20 {
            assert_eq!(
                a.augment_sentence("good day", &mut rng_from_seed(seed))
                    .as_deref(),
                Some("great day")
            );
        }
    }

    #[test]
    fn stopword_sentence_is_absent() {
        let t = fixture();
        assert_eq!(
            augmenter(&t).augment_sentence("the and of", &mut rng_from_seed(1)),
            None
        );
    }

    #[test]
    fn sentence_is_deterministic_and_changed() {
        let t = fixture();
        let a = augmenter(&t);
        let text = "love monday traffic meeting";
        let x = a.augment_sentence(text, &mut rng_from_seed(9)).unwrap();
        let y = a.augment_sentence(text, &mut rng_from_seed(9)).unwrap();
        assert_eq!(x, y);
        assert_ne!(x, text);
        assert_eq!(x.split(' ').count(), 4);
    }

    #[test]
    fn requested_rounding() {
        let p = AugmentPolicy {
            increase_pct: 20.0,
            ..Default::default()
        };
        assert_eq!(p.requested(100), 20);
        let p = AugmentPolicy::default();
        assert_eq!(p.requested(549), 55);
        assert_eq!(p.requested(5), 1);
    }

    #[test]
    fn policy_validation() {
        let mut p = AugmentPolicy::default();
        p.increase_pct = 0.0;
        assert!(p.validate().is_err());
        p = AugmentPolicy::default();
        p.k_candidates = 0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn no_target_samples_is_an_error() {
        let t = fixture();
        let d = Dataset::new(
            "d",
            vec![(
                Sample::original("d:0", "good day", Label::NotSarcastic),
                Split::Train,
            )],
        )
        .unwrap();
        assert!(matches!(
            augment_class(&d, &t, &AugmentPolicy::default()),
            Err(Error::InvalidDataset(_))
        ));
    }

    #[test]
    fn unreachable_floor_exhausts_every_source() {
        let t = fixture();
        let d = Dataset::new(
            "d",
            vec![
                (
                    Sample::original("d:0", "good day", Label::Sarcastic),
                    Split::Train,
                ),
                (
                    Sample::original("d:1", "love monday", Label::Sarcastic),
                    Split::Train,
                ),
                (
                    Sample::original("d:2", "meeting", Label::NotSarcastic),
                    Split::Train,
                ),
            ],
        )
        .unwrap();
        let policy = AugmentPolicy {
            min_similarity: 0.9999,
            increase_pct: 100.0,
            ..Default::default()
        };
        let (out, report) = augment_class(&d, &t, &policy).unwrap();
        assert_eq!(report.requested, 2);
        assert_eq!(report.generated, 0);
        assert_eq!(report.exhausted_sources, 2);
        assert_eq!(out, d);
    }
}
