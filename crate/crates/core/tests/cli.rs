use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_embaug");
const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixtures");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_plan(dir: &Path, datasets: &str) -> String {
    let plan = format!(
        r#"{{
  "datasets": {datasets},
  "levels": [0, 10],
  "embeddings": "{FIXTURES}/embeddings-d10.txt",
  "master_seed": 5,
  "output_dir": "out"
}}"#
    );
    let path = dir.join("plan.json");
    fs::write(&path, plan).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn stats_prints_table_row() {
    let o = run(&["stats", &format!("{FIXTURES}/tiny.csv")]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        "Dataset\tTrain\tVal\tTest\t% Sarcasm\ntiny\t8\t1\t1\t30.00%\n"
    );
}

#[test]
fn unknown_flag_is_usage_error() {
    let o = run(&["stats", "--frobnicate", "x.csv"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn missing_file_is_io_error() {
    assert_eq!(code(&run(&["stats", "/nonexistent/data.csv"])), 5);
}

#[test]
fn invalid_plan_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    fs::write(
        &plan,
        r#"{"datasets": [], "levels": [0], "embeddings": "e.txt", "output_dir": "o"}"#,
    )
    .unwrap();
    let o = run(&["experiment", "--plan", plan.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("datasets"));
}

#[test]
fn experiment_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let plan = write_plan(
        dir.path(),
        &format!(r#"[{{"name": "augfix", "path": "{FIXTURES}/augfix.csv"}}]"#),
    );
    let o = run(&["--json", "experiment", "--plan", &plan]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 2);
    assert_eq!(v["results"][0]["level"], 0.0);

    let out = dir.path().join("out");
    assert!(out.join("runs/augfix/0.json").exists());
    assert!(out.join("runs/augfix/10.json").exists());
    let o = run(&["report", out.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("metric,dataset,Non-augmented,10% augmented\nf_score,augfix,"));
}

#[test]
fn corrupt_dataset_gives_partial_failure() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "text,label,split\nhello,maybe,train\n").unwrap();
    let plan = write_plan(
        dir.path(),
        &format!(
            r#"[{{"name": "augfix", "path": "{FIXTURES}/augfix.csv"}}, {{"name": "bad", "path": "{}"}}]"#,
            bad.display()
        ),
    );
    let o = run(&["experiment", "--plan", &plan]);
    assert_eq!(code(&o), 1);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["results"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["failures"].as_array().unwrap().len(), 2);
}

#[test]
fn preprocess_augment_train_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_string_lossy().into_owned();
    let emb = format!("{FIXTURES}/embeddings-d10.txt");

    assert_eq!(
        code(&run(&[
            "preprocess",
            &format!("{FIXTURES}/augfix.csv"),
            &p("clean.csv")
        ])),
        0
    );
    let o = run(&[
        "augment",
        &p("clean.csv"),
        &p("aug.csv"),
        "--embeddings",
        &emb,
        "--pct",
        "20",
        "--seed",
        "4",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["requested"], 20);
    assert_eq!(rep["generated"], 20);

    let o = run(&[
        "train",
        &p("aug.csv"),
        "--embeddings",
        &emb,
        "--model",
        &p("m.json"),
        "--seed",
        "128",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&[
        "--json",
        "evaluate",
        &p("aug.csv"),
        "--embeddings",
        &emb,
        "--model",
        &p("m.json"),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let cm = &m["cm"];
    let total: u64 = ["tp", "tn", "fp", "fn"]
        .iter()
        .map(|k| cm[k].as_u64().unwrap())
        .sum();
    assert_eq!(total, 20);
}
