//! Confusion matrices, F-score, Matthews correlation and run-to-run deltas.
//!
//! Degenerate denominators (no positive predictions and no positive gold
//! labels for F-score; any empty margin for MCC) yield 0 together with a
//! `degenerate` flag rather than NaN.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::rounding::round_half_up;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        ConfusionMatrix { tp, tn, fp, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// The same counts seen from the other class (tp↔tn, fp↔fn).
    pub fn swap_roles(&self) -> Self {
        ConfusionMatrix::new(self.tn, self.tp, self.fn_, self.fp)
    }

    /// Counts for the inverted classifier (every prediction flipped).
    pub fn invert_predictions(&self) -> Self {
        ConfusionMatrix::new(self.fn_, self.fp, self.tn, self.tp)
    }
}

/// Tallies predictions against gold labels, with `positive` as the positive class.
pub fn confusion(
    predictions: &[Label],
    gold: &[Label],
    positive: Label,
) -> Result<ConfusionMatrix> {
    if predictions.len() != gold.len() {
        return Err(Error::Evaluation(format!(
            "{} predictions for {} gold labels",
            predictions.len(),
            gold.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::Evaluation("nothing to evaluate".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &g) in predictions.iter().zip(gold) {
        match (p == positive, g == positive) {
            (true, true) => cm.tp += 1,
            (false, false) => cm.tn += 1,
            (true, false) => cm.fp += 1,
            (false, true) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// A ratio that falls back to 0 when its denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub value: f64,
    pub degenerate: bool,
}

impl Score {
    fn ratio(num: f64, den: f64) -> Score {
        if den == 0.0 {
            Score {
                value: 0.0,
                degenerate: true,
            }
        } else {
            Score {
                value: num / den,
                degenerate: false,
            }
        }
    }
}

pub fn precision(cm: &ConfusionMatrix) -> Score {
    Score::ratio(cm.tp as f64, (cm.tp + cm.fp) as f64)
}

pub fn recall(cm: &ConfusionMatrix) -> Score {
    Score::ratio(cm.tp as f64, (cm.tp + cm.fn_) as f64)
}

/// Positive-class F1: `2·tp / (2·tp + fp + fn)`.
pub fn f_score(cm: &ConfusionMatrix) -> Score {
    Score::ratio(2.0 * cm.tp as f64, (2 * cm.tp + cm.fp + cm.fn_) as f64)
}

/// Unweighted mean of the F1 of both classes.
pub fn macro_f_score(cm: &ConfusionMatrix) -> Score {
    let pos = f_score(cm);
    let neg = f_score(&cm.swap_roles());
    Score {
        value: (pos.value + neg.value) / 2.0,
        degenerate: pos.degenerate || neg.degenerate,
    }
}

/// Matthews correlation coefficient. The numerator is exact in 128-bit
/// integers; the denominator is the product of two square roots so no
/// intermediate exceeds `f64` range.
pub fn mcc(cm: &ConfusionMatrix) -> Score {
    let (tp, tn, fp, fn_) = (cm.tp as i128, cm.tn as i128, cm.fp as i128, cm.fn_ as i128);
    let factors = [tp + fp, tp + fn_, tn + fp, tn + fn_];
    if factors.contains(&0) {
        return Score {
            value: 0.0,
            degenerate: true,
        };
    }
    let numerator = (tp * tn - fp * fn_) as f64;
    let left = ((factors[0] * factors[1]) as f64).sqrt();
    let right = ((factors[2] * factors[3]) as f64).sqrt();
    Score {
        value: (numerator / left / right).clamp(-1.0, 1.0),
        degenerate: false,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FScoreMode {
    #[default]
    Positive,
    Macro,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub mcc: f64,
    pub cm: ConfusionMatrix,
    pub f_score_mode: FScoreMode,
    /// Names of measures that hit a zero denominator.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degenerate: Vec<String>,
}

impl MetricSet {
    pub fn from_confusion(cm: ConfusionMatrix, mode: FScoreMode) -> Self {
        let p = precision(&cm);
        let r = recall(&cm);
        let f = match mode {
            FScoreMode::Positive => f_score(&cm),
            FScoreMode::Macro => macro_f_score(&cm),
        };
        let m = mcc(&cm);
        let degenerate = [("precision", p), ("recall", r), ("f_score", f), ("mcc", m)]
            .into_iter()
            .filter(|(_, s)| s.degenerate)
            .map(|(n, _)| n.to_string())
            .collect();
        MetricSet {
            precision: p.value,
            recall: r.value,
            f_score: f.value,
            mcc: m.value,
            cm,
            f_score_mode: mode,
            degenerate,
        }
    }

    pub fn from_labels(predictions: &[Label], gold: &[Label], mode: FScoreMode) -> Result<Self> {
        Ok(Self::from_confusion(
            confusion(predictions, gold, Label::Sarcastic)?,
            mode,
        ))
    }

    /// Metric values as the only information, e.g. published figures.
    pub fn from_published(f_score: f64, mcc: f64) -> Self {
        MetricSet {
            precision: 0.0,
            recall: 0.0,
            f_score,
            mcc,
            cm: ConfusionMatrix::default(),
            f_score_mode: FScoreMode::Positive,
            degenerate: Vec::new(),
        }
    }

    pub const CSV_HEADER: &'static str = "precision,recall,f_score,mcc,tp,tn,fp,fn";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.4},{:.4},{:.4},{:.4},{},{},{},{}",
            self.precision,
            self.recall,
            self.f_score,
            self.mcc,
            self.cm.tp,
            self.cm.tn,
            self.cm.fp,
            self.cm.fn_
        )
    }
}

/// A relative change that exists only when the baseline is non-zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relative {
    Pct(f64),
    Undefined,
}

impl Relative {
    pub fn between(baseline: u64, treated: u64) -> Relative {
        if baseline == 0 {
            Relative::Undefined
        } else {
            let change = (treated as f64 - baseline as f64) / baseline as f64 * 100.0;
            Relative::Pct(round_half_up(change, 2))
        }
    }
}

impl fmt::Display for Relative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relative::Pct(v) => write!(f, "{v:+.2}%"),
            Relative::Undefined => f.write_str("n/a"),
        }
    }
}

impl Serialize for Relative {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Relative::Pct(v) => s.serialize_f64(*v),
            Relative::Undefined => s.serialize_str("n/a"),
        }
    }
}

impl<'de> Deserialize<'de> for Relative {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Relative::Pct(v)),
            Raw::Text(t) if t == "n/a" => Ok(Relative::Undefined),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("unexpected delta {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDeltas {
    pub tp: Relative,
    pub tn: Relative,
    pub fp: Relative,
    #[serde(rename = "fn")]
    pub fn_: Relative,
}

/// Treated-minus-baseline differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    /// Absolute F-score change in points (×100), 1 decimal.
    pub f_score_points: f64,
    /// Absolute MCC change in points (×100), 1 decimal.
    pub mcc_points: f64,
    /// Relative change of each confusion cell, in percent, 2 decimals.
    pub cells_pct: CellDeltas,
}

impl DeltaReport {
    pub const CSV_HEADER: &'static str = "f_score_points,mcc_points,tp_pct,tn_pct,fp_pct,fn_pct";

    pub fn csv_row(&self) -> String {
        let cell = |r: Relative| match r {
            Relative::Pct(v) => format!("{v:.2}"),
            Relative::Undefined => "n/a".into(),
        };
        format!(
            "{:.1},{:.1},{},{},{},{}",
            self.f_score_points,
            self.mcc_points,
            cell(self.cells_pct.tp),
            cell(self.cells_pct.tn),
            cell(self.cells_pct.fp),
            cell(self.cells_pct.fn_)
        )
    }
}

pub fn compare_runs(baseline: &MetricSet, treated: &MetricSet) -> DeltaReport {
    let points = |a: f64, b: f64| round_half_up((b - a) * 100.0, 1) + 0.0;
    let (b, t) = (&baseline.cm, &treated.cm);
    DeltaReport {
        f_score_points: points(baseline.f_score, treated.f_score),
        mcc_points: points(baseline.mcc, treated.mcc),
        cells_pct: CellDeltas {
            tp: Relative::between(b.tp, t.tp),
            tn: Relative::between(b.tn, t.tn),
            fp: Relative::between(b.fp, t.fp),
            fn_: Relative::between(b.fn_, t.fn_),
        },
    }
}
