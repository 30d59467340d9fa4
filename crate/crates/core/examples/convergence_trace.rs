//! Record best-so-far traces for a few runs and export them as long-format
//! CSV for plotting.

use mlshade::harness::{execute, export_trace, ExperimentConfig};

fn main() -> mlshade::Result<()> {
    let cfg = ExperimentConfig {
        problems: vec!["ackley".into(), "schwefel12".into()],
        dim: 10,
        runs: 5,
        budget: Some(30_000),
        trace: true,
        ..Default::default()
    };
    let result = execute(&cfg)?;
    let path = std::env::temp_dir().join("mlshade-trace.csv");
    let rows = export_trace(&result.entries, &path)?;
    println!("{rows} rows written to {}", path.display());

    let first = &result.entries[0];
    for p in first.record.trace.iter().step_by(first.record.trace.len() / 8 + 1) {
        println!("{} run {}: nfes {:>6}  best {:.4e}", first.problem, first.run, p.nfes, p.best_f);
    }
    Ok(())
}
