//! Compare the full algorithm against an ablation with paired signed-rank
//! tests, producing a better/similar/worse tally.
//!
//! ```text
//! cargo run --release --example ablation_compare [variant]
//! ```

use mlshade::harness::{compare_variants, ExperimentConfig};
use mlshade::Variant;

fn main() -> mlshade::Result<()> {
    let other: Variant = std::env::args().nth(1).as_deref().unwrap_or("no-restart").parse()?;
    let full = ExperimentConfig {
        problems: ["rastrigin", "ackley", "griewank", "rosenbrock"].map(String::from).to_vec(),
        dim: 10,
        runs: 15,
        budget: Some(50_000),
        ..Default::default()
    };
    let ablated = ExperimentConfig { variant: other, ..full.clone() };

    let cmp = compare_variants(&full, &ablated, 0.05)?;
    println!("{:<12} {:>12} {:>12} {:>9}  verdict", "problem", "mean full", format!("mean {other}"), "p");
    for r in &cmp.rows {
        println!("{:<12} {:>12.4e} {:>12.4e} {:>9.4}  {}", r.problem, r.mean_a, r.mean_b, r.p_value, r.verdict);
    }
    println!("better/similar/worse: {}", cmp.tally);
    Ok(())
}
