//! Lays out published-style result tables from bare (dataset, level, F1, MCC)
//! values in all three report formats.
//!
//! ```sh
//! cargo run --example report_tables
//! ```

use embaug::experiment::{emit_report, ReportFormat, RunResult};

fn main() {
    let rows = [
        (
            "iSarcasm",
            [0.3720, 0.3809, 0.4044, 0.3828],
            [0.2789, 0.2964, 0.3084, 0.2939],
        ),
        (
            "SemEval-18",
            [0.6606, 0.6666, 0.6707, 0.6746],
            [0.4128, 0.4286, 0.4362, 0.4382],
        ),
    ];
    let mut results = Vec::new();
    for (name, f, m) in rows {
        for (j, level) in [0.0, 10.0, 20.0, 30.0].into_iter().enumerate() {
            results.push(RunResult::published(name, level, f[j], m[j]));
        }
    }
    print!("{}", emit_report(&results, ReportFormat::Markdown, true));
    println!();
    print!("{}", emit_report(&results, ReportFormat::Tsv, false));
    println!();
    print!("{}", emit_report(&results, ReportFormat::Csv, false));
}
