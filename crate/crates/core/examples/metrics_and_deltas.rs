//! Scores two confusion matrices and reports the change between them.
//!
//! ```sh
//! cargo run --example metrics_and_deltas
//! ```

use embaug::metrics::{compare_runs, f_score, mcc, ConfusionMatrix, FScoreMode, MetricSet};

fn main() {
    let baseline = ConfusionMatrix::new(40, 300, 60, 80);
    let treated = ConfusionMatrix::new(52, 290, 70, 68);
    for (name, cm) in [("baseline", baseline), ("treated", treated)] {
        println!(
            "{name}: F1 {:.4} MCC {:.4}",
            f_score(&cm).value,
            mcc(&cm).value
        );
    }
    let d = compare_runs(
        &MetricSet::from_confusion(baseline, FScoreMode::Positive),
        &MetricSet::from_confusion(treated, FScoreMode::Positive),
    );
    println!(
        "{}",
        serde_json::to_string_pretty(&d).expect("deltas serialize")
    );
}
