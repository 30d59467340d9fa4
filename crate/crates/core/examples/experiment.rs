//! A benchmark experiment driven by a key-value config document, writing
//! table.csv, table.txt and records.jsonl.

use std::path::Path;

use mlshade::harness::{run_experiment, ExperimentConfig};

const CONFIG: &str = "
# seven builtins, short budget
problems = sphere, ellipsoid, rosenbrock, rastrigin, ackley, griewank, schwefel12
dim = 5
runs = 5
seed = 1
budget = 20000
variant = full
";

fn main() -> mlshade::Result<()> {
    let mut cfg = ExperimentConfig::parse(CONFIG, Path::new("inline.cfg"))?;
    cfg.out_dir = std::env::temp_dir().join("mlshade-experiment");
    let result = run_experiment(&cfg)?;
    print!("{}", result.table.to_text());
    println!("{} runs recorded in {}", result.entries.len(), cfg.out_dir.display());
    Ok(())
}
