//! Labeled short-text corpora: loading, validation, deduplication, re-splitting
//! and summary statistics.
//!
//! A [`Dataset`] is immutable once built. Every operation here consumes a
//! reference and returns a new value.
//!
//! File schemas:
//!
//! - CSV with header `text,label[,split]`
//! - JSONL with one object per line, keys `text`, `label` and optional `split`
//!
//! Label tokens are `sarcastic` (positive) and `not_sarcastic`; split tokens are
//! `train`, `val` and `test`. A missing split defaults to `train`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use log::warn;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rounding::{percent_2dp, round_count};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Sarcastic,
    NotSarcastic,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Sarcastic => "sarcastic",
            Label::NotSarcastic => "not_sarcastic",
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Sarcastic => Label::NotSarcastic,
            Label::NotSarcastic => Label::Sarcastic,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Sarcastic
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "sarcastic" => Ok(Label::Sarcastic),
            "not_sarcastic" => Ok(Label::NotSarcastic),
            other => Err(format!(
                "unknown label {other:?} (expected `sarcastic` or `not_sarcastic`)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Original,
    Augmented,
}

/// One labeled text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub text: String,
    pub label: Label,
    pub origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
}

impl Sample {
    pub fn original(id: impl Into<String>, text: impl Into<String>, label: Label) -> Self {
        Sample {
            id: id.into(),
            text: text.into(),
            label,
            origin: Origin::Original,
            parent_id: None,
        }
    }

    pub fn augmented(
        id: impl Into<String>,
        text: impl Into<String>,
        label: Label,
        parent_id: impl Into<String>,
    ) -> Self {
        Sample {
            id: id.into(),
            text: text.into(),
            label,
            origin: Origin::Augmented,
            parent_id: Some(parent_id.into()),
        }
    }
}

/// An ordered collection of samples, each assigned to exactly one split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    name: String,
    samples: Vec<Sample>,
    split_of: BTreeMap<String, Split>,
}

impl Dataset {
    /// Builds a dataset and checks every structural invariant.
    pub fn new(name: impl Into<String>, entries: Vec<(Sample, Split)>) -> Result<Self> {
        let mut samples = Vec::with_capacity(entries.len());
        let mut split_of = BTreeMap::new();
        for (sample, split) in entries {
            if sample.text.trim().is_empty() {
                return Err(Error::InvalidDataset(format!(
                    "sample {} has empty text",
                    sample.id
                )));
            }
            match (&sample.origin, &sample.parent_id) {
                (Origin::Original, Some(_)) => {
                    return Err(Error::InvalidDataset(format!(
                        "original sample {} must not carry a parent id",
                        sample.id
                    )))
                }
                (Origin::Augmented, None) => {
                    return Err(Error::InvalidDataset(format!(
                        "augmented sample {} has no parent id",
                        sample.id
                    )))
                }
                _ => {}
            }
            if split_of.insert(sample.id.clone(), split).is_some() {
                return Err(Error::InvalidDataset(format!(
                    "duplicate sample id {}",
                    sample.id
                )));
            }
            samples.push(sample);
        }
        for sample in &samples {
            if let Some(parent) = &sample.parent_id {
                if !split_of.contains_key(parent) {
                    return Err(Error::InvalidDataset(format!(
                        "augmented sample {} refers to missing parent {parent}",
                        sample.id
                    )));
                }
            }
        }
        Ok(Dataset {
            name: name.into(),
            samples,
            split_of,
        })
    }

    pub fn empty(name: impl Into<String>) -> Self {
        Dataset {
            name: name.into(),
            samples: Vec::new(),
            split_of: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn split_of(&self, id: &str) -> Option<Split> {
        self.split_of.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&Sample> {
        self.samples.iter().find(|s| s.id == id)
    }

    /// Samples paired with their split, in dataset order.
    pub fn entries(&self) -> impl Iterator<Item = (&Sample, Split)> + '_ {
        self.samples.iter().map(move |s| (s, self.split_of[&s.id]))
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &Sample> + '_ {
        self.entries()
            .filter(move |(_, sp)| *sp == split)
            .map(|(s, _)| s)
    }

    pub fn count(&self, split: Split) -> usize {
        self.split_of.values().filter(|s| **s == split).count()
    }

    pub fn renamed(&self, name: impl Into<String>) -> Dataset {
        Dataset {
            name: name.into(),
            ..self.clone()
        }
    }

    pub(crate) fn owned_entries(&self) -> Vec<(Sample, Split)> {
        self.samples
            .iter()
            .map(|s| (s.clone(), self.split_of[&s.id]))
            .collect()
    }

    /// Keeps samples matching `keep`, plus dropping any augmented sample whose
    /// parent was removed. Returns the new dataset and the orphaned ids.
    pub(crate) fn retain_with_orphans<F>(&self, mut keep: F) -> (Dataset, Vec<String>)
    where
        F: FnMut(&Sample) -> bool,
    {
        let kept: Vec<(Sample, Split)> = self
            .owned_entries()
            .into_iter()
            .filter(|(s, _)| keep(s))
            .collect();
        let ids: HashSet<&str> = kept.iter().map(|(s, _)| s.id.as_str()).collect();
        let mut orphans = Vec::new();
        let mut entries = Vec::with_capacity(kept.len());
        for (s, sp) in &kept {
            match &s.parent_id {
                Some(p) if !ids.contains(p.as_str()) => orphans.push(s.id.clone()),
                _ => entries.push((s.clone(), *sp)),
            }
        }
        let dataset = Dataset {
            name: self.name.clone(),
            split_of: entries.iter().map(|(s, sp)| (s.id.clone(), *sp)).collect(),
            samples: entries.into_iter().map(|(s, _)| s).collect(),
        };
        (dataset, orphans)
    }

    /// Replaces split assignments through `reassign`, keeping samples and order.
    pub(crate) fn map_splits<F>(&self, mut reassign: F) -> Dataset
    where
        F: FnMut(&Sample, Split) -> Split,
    {
        let split_of = self
            .samples
            .iter()
            .map(|s| (s.id.clone(), reassign(s, self.split_of[&s.id])))
            .collect();
        Dataset {
            name: self.name.clone(),
            samples: self.samples.clone(),
            split_of,
        }
    }

    /// Appends samples to the dataset, validating the result.
    pub fn with_appended(&self, extra: Vec<(Sample, Split)>) -> Result<Dataset> {
        let mut entries = self.owned_entries();
        entries.extend(extra);
        Dataset::new(self.name.clone(), entries)
    }

    /// Concatenates datasets into one under `name`. Ids must stay unique.
    pub fn concat(name: impl Into<String>, parts: &[Dataset]) -> Result<Dataset> {
        let entries = parts.iter().flat_map(|d| d.owned_entries()).collect();
        Dataset::new(name, entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Jsonl,
}

impl DataFormat {
    /// Guesses the format from a file extension (`.csv`, `.jsonl`, `.json`).
    pub fn from_path(path: &Path) -> Option<DataFormat> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(DataFormat::Csv),
            "jsonl" | "ndjson" | "json" => Some(DataFormat::Jsonl),
            _ => None,
        }
    }
}

impl FromStr for DataFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(DataFormat::Csv),
            "jsonl" => Ok(DataFormat::Jsonl),
            other => Err(format!("unknown data format {other:?}")),
        }
    }
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    text: String,
    label: String,
    #[serde(default)]
    split: Option<String>,
}

#[derive(Debug, Serialize)]
struct OutRecord<'a> {
    text: &'a str,
    label: Label,
    split: Split,
}

/// Loads a dataset, naming it after the file stem.
pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat) -> Result<Dataset> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();
    load_dataset_named(path, format, &name)
}

/// Loads a dataset with an explicit name. Ids are `name:index` in record order.
pub fn load_dataset_named(
    path: impl AsRef<Path>,
    format: DataFormat,
    name: &str,
) -> Result<Dataset> {
    let path = path.as_ref();
    let records = match format {
        DataFormat::Csv => read_csv(path)?,
        DataFormat::Jsonl => read_jsonl(path)?,
    };
    let mut entries = Vec::with_capacity(records.len());
    for (index, (line, record)) in records.into_iter().enumerate() {
        let malformed = |message: String| Error::Malformed {
            path: path.to_path_buf(),
            line,
            message,
        };
        let label: Label = record.label.parse().map_err(malformed)?;
        let split = match record.split.as_deref().map(str::trim) {
            None | Some("") => Split::Train,
            Some(token) => token.parse().unwrap_or_else(|_| {
                warn!(
                    "{}:{line}: unknown split {token:?}, assigning to train",
                    path.display()
                );
                Split::Train
            }),
        };
        if record.text.trim().is_empty() {
            return Err(malformed("empty text field".into()));
        }
        let sample = Sample::original(format!("{name}:{index}"), record.text, label);
        entries.push((sample, split));
    }
    Dataset::new(name, entries)
}

fn read_csv(path: &Path) -> Result<Vec<(usize, RawRecord)>> {
    let file = File::open(path).map_err(|e| Error::read(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let headers = reader.headers().map_err(|e| Error::InvalidFile {
        path: path.to_path_buf(),
        message: format!("cannot read header: {e}"),
    })?;
    for required in ["text", "label"] {
        if !headers.iter().any(|h| h == required) {
            return Err(Error::InvalidFile {
                path: path.to_path_buf(),
                message: format!("missing `{required}` column in header"),
            });
        }
    }
    let headers = headers.clone();
    let mut out = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let raw: RawRecord = record
            .deserialize(Some(&headers))
            .map_err(|e| Error::Malformed {
                path: path.to_path_buf(),
                line,
                message: e.to_string(),
            })?;
        out.push((line, raw));
    }
    Ok(out)
}

fn read_jsonl(path: &Path) -> Result<Vec<(usize, RawRecord)>> {
    let file = File::open(path).map_err(|e| Error::read(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::read(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RawRecord = serde_json::from_str(&line).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: line_no,
            message: e.to_string(),
        })?;
        out.push((line_no, record));
    }
    Ok(out)
}

/// Writes samples in corpus schema (`text`, `label`, `split`).
pub fn save_dataset(d: &Dataset, path: impl AsRef<Path>, format: DataFormat) -> Result<()> {
    let entries: Vec<_> = d.entries().collect();
    write_entries(&entries, path.as_ref(), format)
}

pub(crate) fn write_entries(
    entries: &[(&Sample, Split)],
    path: &Path,
    format: DataFormat,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::write(path, e))?;
    match format {
        DataFormat::Csv => {
            // serialize() emits the header with the first record
            let mut writer = csv::Writer::from_writer(file);
            if entries.is_empty() {
                writer
                    .write_record(["text", "label", "split"])
                    .map_err(|e| csv_write_error(path, e))?;
            }
            for (s, split) in entries {
                writer
                    .serialize(OutRecord {
                        text: &s.text,
                        label: s.label,
                        split: *split,
                    })
                    .map_err(|e| csv_write_error(path, e))?;
            }
            writer.flush().map_err(|e| Error::write(path, e))?;
        }
        DataFormat::Jsonl => {
            let mut writer = BufWriter::new(file);
            for (s, split) in entries {
                let line = serde_json::to_string(&OutRecord {
                    text: &s.text,
                    label: s.label,
                    split: *split,
                })?;
                writeln!(writer, "{line}").map_err(|e| Error::write(path, e))?;
            }
            writer.flush().map_err(|e| Error::write(path, e))?;
        }
    }
    Ok(())
}

fn csv_write_error(path: &Path, e: csv::Error) -> Error {
    Error::write(path, std::io::Error::other(e.to_string()))
}

/// Per-split counts and the positive-class share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    /// Percentage of positive samples over all splits, 2 decimals.
    pub pct_positive: f64,
    /// Positive percentage within each split, 2 decimals.
    pub pct_positive_by_split: BTreeMap<Split, f64>,
}

impl DatasetStats {
    pub fn total(&self) -> usize {
        self.n_train + self.n_val + self.n_test
    }

    /// One tab-separated line: name, the three split counts with thousands
    /// separators, and the positive percentage.
    pub fn render_row(&self, name: &str) -> String {
        format!(
            "{name}\t{}\t{}\t{}\t{:.2}%",
            thousands(self.n_train),
            thousands(self.n_val),
            thousands(self.n_test),
            self.pct_positive
        )
    }
}

pub const STATS_HEADER: &str = "Dataset\tTrain\tVal\tTest\t% Sarcasm";

fn thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

pub fn compute_stats(d: &Dataset) -> DatasetStats {
    let mut counts: HashMap<Split, (u64, u64)> = HashMap::new();
    for (s, split) in d.entries() {
        let entry = counts.entry(split).or_default();
        entry.0 += 1;
        if s.label.is_positive() {
            entry.1 += 1;
        }
    }
    let get = |sp: Split| counts.get(&sp).copied().unwrap_or_default();
    let (total, positive) = counts
        .values()
        .fold((0, 0), |(t, p), (n, k)| (t + n, p + k));
    DatasetStats {
        n_train: get(Split::Train).0 as usize,
        n_val: get(Split::Val).0 as usize,
        n_test: get(Split::Test).0 as usize,
        pct_positive: percent_2dp(positive, total),
        pct_positive_by_split: Split::ALL
            .iter()
            .map(|&sp| {
                let (n, k) = get(sp);
                (sp, percent_2dp(k, n))
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    /// An earlier sample of the same dataset has the same text.
    Within,
    /// An earlier dataset in the list has the same text.
    Across,
    /// Augmented sample whose parent was dropped.
    Orphaned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedSample {
    pub dataset: String,
    pub id: String,
    pub reason: DropReason,
    /// Id of the sample that kept the text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kept: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DedupReport {
    pub dropped: Vec<DroppedSample>,
}

impl DedupReport {
    pub fn is_empty(&self) -> bool {
        self.dropped.is_empty()
    }
}

/// Drops exact duplicate texts within and across datasets. The first
/// occurrence wins, with earlier datasets in `datasets` taking priority.
pub fn dedup(datasets: &[Dataset]) -> (Vec<Dataset>, DedupReport) {
    let mut seen: HashMap<&str, (usize, &str)> = HashMap::new();
    let mut report = DedupReport::default();
    let mut out = Vec::with_capacity(datasets.len());
    for (di, d) in datasets.iter().enumerate() {
        let mut drop: HashSet<&str> = HashSet::new();
        for s in d.samples() {
            match seen.get(s.text.as_str()) {
                Some(&(owner, kept)) => {
                    drop.insert(s.id.as_str());
                    report.dropped.push(DroppedSample {
                        dataset: d.name().to_string(),
                        id: s.id.clone(),
                        reason: if owner == di {
                            DropReason::Within
                        } else {
                            DropReason::Across
                        },
                        kept: Some(kept.to_string()),
                    });
                }
                None => {
                    seen.insert(s.text.as_str(), (di, s.id.as_str()));
                }
            }
        }
        let (kept, orphans) = d.retain_with_orphans(|s| !drop.contains(s.id.as_str()));
        report
            .dropped
            .extend(orphans.into_iter().map(|id| DroppedSample {
                dataset: d.name().to_string(),
                id,
                reason: DropReason::Orphaned,
                kept: None,
            }));
        out.push(kept);
    }
    (out, report)
}

/// Folds validation into training and promotes the test split to validation.
pub fn merge_train_val(d: &Dataset) -> Dataset {
    d.map_splits(|_, split| match split {
        Split::Train | Split::Val => Split::Train,
        Split::Test => Split::Val,
    })
}

/// Moves `round(fraction × n_train)` training samples, chosen by a seeded
/// shuffle, into the validation split.
pub fn split_random(d: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Config(format!(
            "split fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let mut train: Vec<&str> = d.split(Split::Train).map(|s| s.id.as_str()).collect();
    if train.is_empty() {
        return Err(Error::InvalidDataset(format!(
            "dataset {} has no training samples to split",
            d.name()
        )));
    }
    let n_move = round_count(fraction * train.len() as f64);
    if n_move == 0 {
        warn!(
            "split fraction {fraction} of {} training samples rounds to 0; nothing moved",
            train.len()
        );
    }
    train.shuffle(&mut rng_from_seed(seed));
    let moved: HashSet<String> = train[..n_move].iter().map(|s| s.to_string()).collect();
    Ok(d.map_splits(|s, split| {
        if moved.contains(&s.id) {
            Split::Val
        } else {
            split
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(splits: &[(Split, Label)]) -> Dataset {
        let entries = splits
            .iter()
            .enumerate()
            .map(|(i, (sp, l))| {
                (
                    Sample::original(format!("d:{i}"), format!("text {i}"), *l),
                    *sp,
                )
            })
            .collect();
        Dataset::new("d", entries).unwrap()
    }

    fn write_tmp(content: &str, ext: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(ext).tempfile().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_three_line_csv() {
        let f = write_tmp(
            "text,label\nwhat a day,sarcastic\nmeeting at noon,not_sarcastic\nlove mondays,sarcastic\n",
            ".csv",
        );
        let d = load_dataset(f.path(), DataFormat::Csv).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(
            d.samples().iter().filter(|s| s.label.is_positive()).count(),
            2
        );
        assert!(d.samples()[0].id.ends_with(":0"));
        assert_eq!(d.count(Split::Train), 3);
    }

    #[test]
    fn unknown_label_names_line() {
        let f = write_tmp("text,label\nok,sarcastic\nhmm,maybe\n", ".csv");
        let err = load_dataset(f.path(), DataFormat::Csv).unwrap_err();
        match err {
            Error::Malformed { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("maybe"));
            }
            other => panic!("unexpected error {other:?}"),
        }
        let f = write_tmp("{\"text\":\"a\",\"label\":\"maybe\"}\n", ".jsonl");
        let err = load_dataset(f.path(), DataFormat::Jsonl).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 1, .. }));
    }

    #[test]
    fn malformed_jsonl_reports_line() {
        let f = write_tmp(
            "{\"text\":\"a\",\"label\":\"sarcastic\"}\n{\"text\": 3}\n",
            ".jsonl",
        );
        let err = load_dataset(f.path(), DataFormat::Jsonl).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 2, .. }));
    }

    #[test]
    fn missing_file_is_read_error() {
        let err = load_dataset("/nonexistent/x.csv", DataFormat::Csv).unwrap_err();
        assert!(matches!(err, Error::Read { .. }));
    }

    #[test]
    fn unknown_split_defaults_to_train() {
        let f = write_tmp(
            "text,label,split\na,sarcastic,holdout\nb,sarcastic,test\nc,sarcastic,\n",
            ".csv",
        );
        let d = load_dataset(f.path(), DataFormat::Csv).unwrap();
        assert_eq!(d.count(Split::Train), 2);
        assert_eq!(d.count(Split::Test), 1);
    }

    #[test]
    fn stats_arithmetic() {
        let mut spec = vec![(Split::Train, Label::NotSarcastic); 8];
        spec.push((Split::Val, Label::NotSarcastic));
        spec.push((Split::Test, Label::NotSarcastic));
        for e in spec.iter_mut().take(3) {
            e.1 = Label::Sarcastic;
        }
        let st = compute_stats(&fixture(&spec));
        assert_eq!((st.n_train, st.n_val, st.n_test), (8, 1, 1));
        assert_eq!(st.pct_positive, 30.0);
        assert_eq!(st.pct_positive_by_split[&Split::Train], 37.5);
        assert_eq!(st.render_row("tiny"), "tiny\t8\t1\t1\t30.00%");
    }

    #[test]
    fn stats_of_empty_dataset() {
        let st = compute_stats(&Dataset::empty("e"));
        assert_eq!(st.total(), 0);
        assert_eq!(st.pct_positive, 0.0);
    }

    #[test]
    fn published_stats_row() {
        let st = DatasetStats {
            n_train: 3116,
            n_val: 347,
            n_test: 887,
            pct_positive: 17.62,
            pct_positive_by_split: BTreeMap::new(),
        };
        assert_eq!(
            st.render_row("iSarcasm"),
            "iSarcasm\t3,116\t347\t887\t17.62%"
        );
        assert_eq!(thousands(51009), "51,009");
        assert_eq!(thousands(1_234_567), "1,234,567");
        assert_eq!(thousands(0), "0");
    }

    fn texts(d: &Dataset) -> Vec<&str> {
        d.samples().iter().map(|s| s.text.as_str()).collect()
    }

    #[test]
    fn dedup_within_and_across() {
        let a = Dataset::new(
            "a",
            vec![
                (Sample::original("a:0", "x", Label::Sarcastic), Split::Train),
                (Sample::original("a:1", "y", Label::Sarcastic), Split::Train),
                (
                    Sample::original("a:2", "x", Label::NotSarcastic),
                    Split::Test,
                ),
            ],
        )
        .unwrap();
        let b = Dataset::new(
            "b",
            vec![
                (Sample::original("b:0", "y", Label::Sarcastic), Split::Train),
                (Sample::original("b:1", "z", Label::Sarcastic), Split::Train),
            ],
        )
        .unwrap();
        let (out, report) = dedup(&[a, b]);
        assert_eq!(texts(&out[0]), vec!["x", "y"]);
        assert_eq!(texts(&out[1]), vec!["z"]);
        assert_eq!(report.dropped.len(), 2);
        assert_eq!(report.dropped[0].id, "a:2");
        assert_eq!(report.dropped[0].reason, DropReason::Within);
        assert_eq!(report.dropped[1].id, "b:0");
        assert_eq!(report.dropped[1].reason, DropReason::Across);
        assert_eq!(report.dropped[1].kept.as_deref(), Some("a:1"));
    }

    #[test]
    fn dedup_identity_without_shared_texts() {
        let a = fixture(&[(Split::Train, Label::Sarcastic); 3]);
        let b = Dataset::new(
            "b",
            vec![(
                Sample::original("b:0", "other", Label::Sarcastic),
                Split::Train,
            )],
        )
        .unwrap();
        let (out, report) = dedup(&[a.clone(), b.clone()]);
        assert_eq!(out, vec![a, b]);
        assert!(report.is_empty());
    }

    #[test]
    fn dedup_drops_orphaned_augmentations() {
        let d = Dataset::new(
            "a",
            vec![
                (Sample::original("a:0", "x", Label::Sarcastic), Split::Train),
                (Sample::original("a:1", "x", Label::Sarcastic), Split::Train),
                (
                    Sample::augmented("a:1+aug0", "w", Label::Sarcastic, "a:1"),
                    Split::Train,
                ),
            ],
        )
        .unwrap();
        let (out, report) = dedup(&[d]);
        assert_eq!(out[0].len(), 1);
        assert_eq!(report.dropped[1].reason, DropReason::Orphaned);
    }

    #[test]
    fn merge_moves_val_to_train_and_test_to_val() {
        let mut spec = vec![(Split::Train, Label::Sarcastic); 8];
        spec.push((Split::Val, Label::Sarcastic));
        spec.push((Split::Test, Label::NotSarcastic));
        let m = merge_train_val(&fixture(&spec));
        assert_eq!(
            (
                m.count(Split::Train),
                m.count(Split::Val),
                m.count(Split::Test)
            ),
            (9, 1, 0)
        );

        let spec = vec![
            (Split::Train, Label::Sarcastic),
            (Split::Test, Label::Sarcastic),
        ];
        let m = merge_train_val(&fixture(&spec));
        assert_eq!((m.count(Split::Train), m.count(Split::Val)), (1, 1));
        assert_eq!(m.split_of("d:0"), Some(Split::Train));
    }

    #[test]
    fn split_random_is_deterministic() {
        let d = fixture(&[(Split::Train, Label::Sarcastic); 100]);
        let a = split_random(&d, 0.1, 7).unwrap();
        let b = split_random(&d, 0.1, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.count(Split::Train), a.count(Split::Val)), (90, 10));

        let c = split_random(&d, 0.1, 8).unwrap();
        assert_eq!(c.count(Split::Val), 10);
        let val = |d: &Dataset| {
            d.split(Split::Val)
                .map(|s| s.id.clone())
                .collect::<Vec<_>>()
        };
        assert_ne!(val(&a), val(&c));
    }

    #[test]
    fn split_random_rounding_and_errors() {
        let d = fixture(&[(Split::Train, Label::Sarcastic); 3]);
        let s = split_random(&d, 0.1, 1).unwrap();
        assert_eq!(s.count(Split::Val), 0);
        assert!(split_random(&d, 0.0, 1).is_err());
        assert!(split_random(&d, 1.0, 1).is_err());
        let only_test = fixture(&[(Split::Test, Label::Sarcastic)]);
        assert!(split_random(&only_test, 0.5, 1).is_err());
    }

    #[test]
    fn construction_rejects_broken_invariants() {
        let dup = vec![
            (Sample::original("x", "a", Label::Sarcastic), Split::Train),
            (Sample::original("x", "b", Label::Sarcastic), Split::Train),
        ];
        assert!(Dataset::new("d", dup).is_err());
        let orphan = vec![(
            Sample::augmented("y", "a", Label::Sarcastic, "nope"),
            Split::Train,
        )];
        assert!(Dataset::new("d", orphan).is_err());
        let empty = vec![(Sample::original("z", "  ", Label::Sarcastic), Split::Train)];
        assert!(Dataset::new("d", empty).is_err());
    }
}
