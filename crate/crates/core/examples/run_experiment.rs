//! Runs an experiment plan and prints the report.
//!
//! ```sh
//! cargo run --release --example run_experiment -- path/to/plan.json
//! ```

use embaug::experiment::{emit_report, run_experiment, ExperimentPlan, ReportFormat};

fn main() -> embaug::Result<()> {
    env_logger::init();
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixtures/plan.json").to_string()
    });
    let plan = ExperimentPlan::load(&path)?;
    let outcome = run_experiment(&plan)?;
    print!(
        "{}",
        emit_report(&outcome.results, ReportFormat::Markdown, true)
    );
    for f in &outcome.failures {
        eprintln!(
            "failed: {} @ {}% ({}): {}",
            f.dataset, f.level, f.stage, f.message
        );
    }
    Ok(())
}
