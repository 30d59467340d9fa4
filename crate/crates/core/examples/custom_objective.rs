//! Optimize a user-defined closure and watch the run through an observer.

use mlshade::{run_observed, Bounds, FnObjective, RunConfig};

fn main() -> mlshade::Result<()> {
    let dim = 8;
    // Styblinski-Tang, minimum -39.16599·D at x_i = -2.903534
    let bounds = Bounds::uniform(dim, -5.0, 5.0)?;
    let problem = FnObjective::new("styblinski-tang", bounds, |x: &[f64]| {
        0.5 * x.iter().map(|v| v.powi(4) - 16.0 * v * v + 5.0 * v).sum::<f64>()
    })
    .with_known_optimum(-39.166_165_703_771_4 * dim as f64);

    let cfg = RunConfig::new(dim).with_budget(40_000).with_seed(11);
    let rec = run_observed(&problem, &cfg, |s| {
        if s.generation % 100 == 0 {
            println!(
                "gen {:>4}  nfes {:>6}  pop {:>3}  best {:>12.6}  strategy probs [{:.2}, {:.2}, {:.2}]",
                s.generation, s.nfes, s.population.len(), s.best_f, s.strategy_probs[0], s.strategy_probs[1], s.strategy_probs[2]
            );
        }
    })?;

    println!("best f  = {:.8}", rec.best_f);
    println!("error   = {:?}", rec.error);
    println!("best x  = {:.5?}", rec.best_x);
    Ok(())
}
