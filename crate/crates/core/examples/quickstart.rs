//! Minimize a few builtin functions at D = 10 with the default protocol.
//!
//! ```text
//! cargo run --release --example quickstart [problem] [seed]
//! ```

use mlshade::{run, Builtin, RunConfig};

fn main() -> mlshade::Result<()> {
    let mut args = std::env::args().skip(1);
    let names: Vec<String> = match args.next() {
        Some(n) => vec![n],
        None => vec!["sphere".into(), "ellipsoid".into(), "rastrigin".into()],
    };
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    for name in names {
        let problem = Builtin::by_name(&name, 10)?;
        let cfg = RunConfig::new(10).with_seed(seed);
        let rec = run(&problem, &cfg)?;
        println!(
            "{name:<10} error {:.3e}  evals {}  generations {}  restarts {}  local searches {} ({} improved)",
            rec.reported_error(),
            rec.evaluations,
            rec.generations,
            rec.restarts,
            rec.local_searches,
            rec.local_search_improvements,
        );
    }
    Ok(())
}
