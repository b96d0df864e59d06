use std::fs;

use rand::Rng;

use embaug::classify::{
    batch_gradient, export_for_external_trainer, load_export, predict, train, train_on_features,
    ClassifierConfig, ExportInfo,
};
use embaug::corpus::{load_dataset, save_dataset, DataFormat, Dataset, Label, Sample, Split};
use embaug::embeddings::EmbeddingTable;
use embaug::seed::rng_from_seed;
use embaug::synthetic::tiny_fixture;

/// 200 single-word samples around two centers far apart relative to the noise.
fn separable(seed: u64) -> (EmbeddingTable, Vec<Sample>) {
    let mut rng = rng_from_seed(seed);
    let mut words = Vec::new();
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for i in 0..200 {
        let pos = i % 2 == 0;
        let center = if pos { 2.0 } else { -2.0 };
        let row: Vec<f32> = (0..10)
            .map(|d| if d == 0 { center } else { 0.0 } + rng.gen_range(-0.3f32..0.3))
            .collect();
        let w = format!("w{i}");
        let label = if pos {
            Label::Sarcastic
        } else {
            Label::NotSarcastic
        };
        samples.push(Sample::original(format!("s:{i}"), w.clone(), label));
        words.push(w);
        rows.push(row);
    }
    (EmbeddingTable::from_rows(words, rows).unwrap(), samples)
}

fn accuracy(samples: &[&Sample], m: &embaug::classify::TrainedModel, t: &EmbeddingTable) -> f64 {
    let ok = samples
        .iter()
        .filter(|s| predict(m, &s.text, t, 40).unwrap().label == s.label)
        .count();
    ok as f64 / samples.len() as f64
}

#[test]
fn separable_clusters_are_learned() {
    let (t, samples) = separable(5);
    let (train_part, held) = samples.split_at(150);
    let train_refs: Vec<&Sample> = train_part.iter().collect();
    let held_refs: Vec<&Sample> = held.iter().collect();
    let m = train(&train_refs, &ClassifierConfig::default(), &t).unwrap();
    assert!(accuracy(&train_refs, &m, &t) >= 0.95);
    assert!(accuracy(&held_refs, &m, &t) >= 0.9);
}

#[test]
fn training_is_deterministic() {
    let (t, samples) = separable(6);
    let refs: Vec<&Sample> = samples.iter().collect();
    let a = train(&refs, &ClassifierConfig::default(), &t).unwrap();
    let b = train(&refs, &ClassifierConfig::default(), &t).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn single_sample_full_batch_step_follows_gradient() {
    // one epoch of one step: warmup of ceil(0 * 1) = 0 steps, so the lone step runs at the peak rate
    let cfg = ClassifierConfig {
        weight_decay: 0.0,
        warmup_ratio: 0.0,
        num_train_epochs: 1,
        train_batch_size: 1,
        max_grad_norm: 1e9,
        learning_rate: 0.1,
        ..Default::default()
    };
    let x = vec![0.5, -1.0, 2.0];
    let (m, trace) = train_on_features(std::slice::from_ref(&x), &[1.0], &cfg, String::new()).unwrap();
    let (gw, gb) = batch_gradient(&[0.0; 3], 0.0, &[&x], &[1.0]);
    assert_eq!(trace.learning_rates, vec![0.1]);
    for (w, g) in m.weights.iter().zip(&gw) {
        assert!((w + 0.1 * g).abs() < 1e-15);
    }
    assert!((m.bias + 0.1 * gb).abs() < 1e-15);
}

#[test]
fn csv_and_jsonl_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = tiny_fixture();
    let csv = dir.path().join("tiny.csv");
    let jsonl = dir.path().join("tiny.jsonl");
    save_dataset(&d, &csv, DataFormat::Csv).unwrap();
    let from_csv = load_dataset(&csv, DataFormat::Csv).unwrap();
    save_dataset(&from_csv, &jsonl, DataFormat::Jsonl).unwrap();
    let from_jsonl = load_dataset(&jsonl, DataFormat::Jsonl).unwrap();
    let rows = |d: &Dataset| {
        d.entries()
            .map(|(s, sp)| (s.text.clone(), s.label, sp))
            .collect::<Vec<_>>()
    };
    assert_eq!(rows(&from_csv), rows(&d));
    assert_eq!(rows(&from_jsonl), rows(&d));
}

#[test]
fn shipped_tiny_fixture_matches_generator() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixtures");
    let rows = |d: &Dataset| {
        d.entries()
            .map(|(s, sp)| (s.text.clone(), s.label, sp))
            .collect::<Vec<_>>()
    };
    let shipped = load_dataset(format!("{dir}/tiny.csv"), DataFormat::Csv).unwrap();
    assert_eq!(rows(&shipped), rows(&tiny_fixture()));
    let shipped = load_dataset(format!("{dir}/tiny.jsonl"), DataFormat::Jsonl).unwrap();
    assert_eq!(rows(&shipped), rows(&tiny_fixture()));
}

#[test]
fn export_round_trip_and_reexport_is_identical() {
    let d = tiny_fixture();
    let info = ExportInfo {
        augmentation_report: Some("augment.json".into()),
        config_fingerprint: ClassifierConfig::default().fingerprint(),
        seed: 128,
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let manifest = export_for_external_trainer(&d, a.path(), &info).unwrap();
    export_for_external_trainer(&d, b.path(), &info).unwrap();
    assert_eq!(manifest.files.iter().map(|f| f.count).sum::<usize>(), 10);
    let mut lines = 0;
    for name in ["train.jsonl", "val.jsonl", "test.jsonl", "manifest.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        assert_eq!(x, fs::read(b.path().join(name)).unwrap(), "{name}");
        if name.ends_with(".jsonl") {
            lines += x.iter().filter(|c| **c == b'\n').count();
        }
    }
    assert_eq!(lines, 10);
    let back = load_export(a.path()).unwrap();
    let mut got: Vec<_> = back
        .entries()
        .map(|(s, sp)| (s.text.clone(), s.label, sp))
        .collect();
    let mut want: Vec<_> = d
        .entries()
        .map(|(s, sp)| (s.text.clone(), s.label, sp))
        .collect();
    got.sort_by(|x, y| x.0.cmp(&y.0));
    want.sort_by(|x, y| x.0.cmp(&y.0));
    assert_eq!(got, want);
    assert_eq!(back.count(Split::Train), 8);
}

#[test]
fn shipped_synthetic_corpus_matches_generator() {
    use embaug::synthetic::{imbalanced_corpus, ImbalancedSpec, IMBALANCED_SEED};
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixtures");
    let rows = |d: &Dataset| {
        d.entries()
            .map(|(s, sp)| (s.text.clone(), s.label, sp))
            .collect::<Vec<_>>()
    };
    let shipped = load_dataset(format!("{dir}/synthetic-imbalanced.csv"), DataFormat::Csv).unwrap();
    let fresh = imbalanced_corpus(
        "synthetic-imbalanced",
        IMBALANCED_SEED,
        &ImbalancedSpec::default(),
    );
    assert_eq!(rows(&shipped), rows(&fresh));
}
