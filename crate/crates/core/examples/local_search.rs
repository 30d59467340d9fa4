//! Projected quasi-Newton refinement on a box with an active bound.

use mlshade::local_search::bounded_quasi_newton;
use mlshade::Bounds;

fn main() -> mlshade::Result<()> {
    // Rosenbrock restricted to x1 <= 0.5: the constrained minimum sits on the bound
    let bounds = Bounds::new(vec![-2.0, -2.0], vec![0.5, 2.0])?;
    let rosen = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);

    for budget in [50, 200, 1000] {
        let res = bounded_quasi_newton(rosen, &bounds, &[-1.5, 1.8], budget);
        println!(
            "budget {budget:>4}: x = [{:.6}, {:.6}]  f = {:.6e}  evals {}  stop {:?}  |grad| {:?}",
            res.x[0], res.x[1], res.f, res.evaluations, res.stop, res.grad_norm
        );
    }
    Ok(())
}
