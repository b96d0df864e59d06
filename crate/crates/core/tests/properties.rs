use std::collections::HashSet;

use proptest::prelude::*;

use embaug::augment::{augment_class, AugmentPolicy};
use embaug::corpus::{
    compute_stats, dedup, merge_train_val, split_random, Dataset, Label, Origin, Sample, Split,
};
use embaug::embeddings::EmbeddingTable;
use embaug::metrics::{f_score, mcc, ConfusionMatrix};
use embaug::preprocess::{Pipeline, Stopwords};
use embaug::seed::rng_from_seed;
use embaug::synthetic::{
    augmentation_fixture, imbalanced_corpus, noisy_tweet, random_table, ImbalancedSpec,
};

fn fixture_table() -> EmbeddingTable {
    embaug::embeddings::load_embeddings(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/data/fixtures/embeddings-d10.txt"
    ))
    .unwrap()
}

fn arb_dataset() -> impl Strategy<Value = Dataset> {
    prop::collection::vec((0u8..6, any::<bool>(), 0u8..3), 0..40).prop_map(|rows| {
        let entries = rows
            .into_iter()
            .enumerate()
            .map(|(i, (t, pos, sp))| {
                let label = if pos {
                    Label::Sarcastic
                } else {
                    Label::NotSarcastic
                };
                (
                    Sample::original(format!("p:{i}"), format!("text {t}"), label),
                    Split::ALL[sp as usize],
                )
            })
            .collect();
        Dataset::new("p", entries).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pipeline_is_idempotent_on_noisy_text(seed in any::<u64>()) {
        let p = Pipeline::default();
        let text = noisy_tweet(&mut rng_from_seed(seed));
        let once = p.run(&text);
        prop_assert_eq!(p.run(&once), once.clone());
        prop_assert!(once.is_ascii());
    }

    #[test]
    fn pipeline_is_idempotent_on_arbitrary_text(text in "\\PC{0,80}") {
        let p = Pipeline::default();
        let once = p.run(&text);
        prop_assert_eq!(p.run(&once), once.clone());
        let sw = Stopwords::english();
        prop_assert!(once.split_whitespace().all(|t| !sw.contains(t)));
    }

    #[test]
    fn dedup_is_idempotent(a in arb_dataset(), b in arb_dataset()) {
        let b = b.renamed("q");
        let (once, _) = dedup(&[a, b]);
        let (twice, report) = dedup(&once);
        prop_assert!(report.is_empty());
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn merge_preserves_samples(d in arb_dataset()) {
        let m = merge_train_val(&d);
        prop_assert_eq!(m.len(), d.len());
        prop_assert_eq!(m.count(Split::Test), 0);
        prop_assert_eq!(m.count(Split::Val), d.count(Split::Test));
        prop_assert_eq!(m.count(Split::Train), d.count(Split::Train) + d.count(Split::Val));
    }

    #[test]
    fn split_random_moves_rounded_share(d in arb_dataset(), seed in any::<u64>()) {
        prop_assume!(d.count(Split::Train) > 0);
        let s = split_random(&d, 0.1, seed).unwrap();
        let moved = embaug::rounding::round_count(0.1 * d.count(Split::Train) as f64);
        prop_assert_eq!(s.count(Split::Val), d.count(Split::Val) + moved);
        prop_assert_eq!(s, split_random(&d, 0.1, seed).unwrap());
    }

    #[test]
    fn knn_matches_brute_force(seed in any::<u64>(), q in 0usize..300, k in 1usize..12) {
        let t = random_table(300, 8, seed);
        let word = t.word(q).to_string();
        let got = t.nearest_neighbors(&word, k, -1.0).unwrap();
        let mut all: Vec<(f64, usize)> = (0..t.len())
            .filter(|&i| i != q)
            .map(|i| (brute_cosine(t.row(q), t.row(i)), i))
            .collect();
        all.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        prop_assert_eq!(got.len(), k);
        for (n, (sim, i)) in got.iter().zip(&all) {
            prop_assert_eq!(&n.word, t.word(*i));
            prop_assert!((n.similarity - sim).abs() < 1e-9);
        }
    }

    #[test]
    fn metric_oracles(tp in 0u64..500, tn in 0u64..500, fp in 0u64..500, fn_ in 0u64..500) {
        let cm = ConfusionMatrix::new(tp, tn, fp, fn_);
        let f = f_score(&cm).value;
        let expected_f = if 2 * tp + fp + fn_ == 0 { 0.0 } else { 2.0 * tp as f64 / (2 * tp + fp + fn_) as f64 };
        prop_assert!((f - expected_f).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&f));
        let m = mcc(&cm).value;
        prop_assert!((-1.0..=1.0).contains(&m));
        prop_assert!((mcc(&cm.swap_roles()).value - m).abs() < 1e-12);
        prop_assert!((mcc(&cm.invert_predictions()).value + m).abs() < 1e-12);
    }
}

fn brute_cosine(a: &[f32], b: &[f32]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| *x as f64 * *y as f64).sum();
    let na: f64 = a.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
    dot / (na * nb)
}

fn split_bytes(d: &Dataset, split: Split) -> Vec<(String, String, Label)> {
    d.split(split)
        .map(|s| (s.id.clone(), s.text.clone(), s.label))
        .collect()
}

#[test]
fn augmentation_invariants() {
    let table = fixture_table();
    let base = imbalanced_corpus("syn", 3, &ImbalancedSpec::default());
    for pct in [10.0, 20.0, 30.0, 250.0] {
        let policy = AugmentPolicy {
            increase_pct: pct,
            seed: 42,
            ..Default::default()
        };
        let (out, rep) = augment_class(&base, &table, &policy).unwrap();
        assert!(rep.generated <= rep.requested);
        for sp in [Split::Val, Split::Test] {
            assert_eq!(split_bytes(&out, sp), split_bytes(&base, sp));
        }
        let before: HashSet<&str> = base.split(Split::Train).map(|s| s.text.as_str()).collect();
        for s in out
            .samples()
            .iter()
            .filter(|s| s.origin == Origin::Augmented)
        {
            let parent = base.get(s.parent_id.as_deref().unwrap()).unwrap();
            assert_eq!(parent.origin, Origin::Original);
            assert_eq!(parent.label, Label::Sarcastic);
            assert_eq!(base.split_of(&parent.id), Some(Split::Train));
            assert_eq!(out.split_of(&s.id), Some(Split::Train));
            assert!(!before.contains(s.text.as_str()));
        }
        let pos = |d: &Dataset| d.samples().iter().filter(|s| s.label.is_positive()).count();
        assert_eq!(pos(&out), pos(&base) + rep.generated);
        let st = compute_stats(&out);
        assert_eq!(st.total(), base.len() + rep.generated);
    }
}

#[test]
fn augmentation_ignores_thread_count() {
    let table = fixture_table();
    let d = augmentation_fixture();
    let policy = AugmentPolicy {
        increase_pct: 30.0,
        seed: 9,
        ..Default::default()
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| augment_class(&d, &table, &policy).unwrap())
    };
    let (a, ra) = run(1);
    let (b, rb) = run(4);
    assert_eq!(ra, rb);
    assert_eq!(a, b);
}
