//! Late-phase local refinement of the incumbent.
//!
//! On a box-constrained problem with no other constraints, a sequential
//! quadratic programming step reduces to a quasi-Newton step projected onto
//! the box, which is what [`bounded_quasi_newton`] does: BFGS inverse-Hessian
//! updates, central-difference gradients, and an Armijo line search along
//! the projected path that backtracks by quadratic interpolation and expands
//! while the function keeps decreasing.

use rand::Rng;

use crate::engine::Individual;
use crate::problem::Bounds;

pub const P_LS_LOW: f64 = 0.01;
pub const P_LS_HIGH: f64 = 0.1;

const ARMIJO_C: f64 = 1e-4;
const GRAD_TOL: f64 = 1e-8;
const STEP_TOL: f64 = 1e-12;
const FD_STEP: f64 = 1e-6;
const MAX_EXPANSIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Budget,
    Gradient,
    Step,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiNewtonResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: u64,
    /// Euclidean norm of the projected gradient at the final iterate, if a
    /// gradient was computed there.
    pub grad_norm: Option<f64>,
    pub stop: StopReason,
}

/// Minimum budget for one full iteration (start value, gradient, one probe).
pub fn min_budget(dim: usize) -> u64 {
    2 * dim as u64 + 2
}

/// Projected BFGS from `x0` using at most `budget` evaluations of `f`.
/// Never returns a point worse than `x0`.
pub fn bounded_quasi_newton<F>(mut f: F, bounds: &Bounds, x0: &[f64], budget: u64) -> QuasiNewtonResult
where
    F: FnMut(&[f64]) -> f64,
{
    if budget == 0 {
        return QuasiNewtonResult {
            x: x0.to_vec(),
            f: f64::NAN,
            evaluations: 0,
            grad_norm: None,
            stop: StopReason::Budget,
        };
    }
    let f0 = f(x0);
    let mut res = quasi_newton_from(&mut f, bounds, x0, f0, budget - 1);
    res.evaluations += 1;
    res
}

/// As [`bounded_quasi_newton`] with the start value already known, so
/// `budget` covers only new evaluations.
pub fn quasi_newton_from<F>(f: &mut F, bounds: &Bounds, x0: &[f64], f0: f64, budget: u64) -> QuasiNewtonResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let lo = bounds.lower();
    let hi = bounds.upper();
    let mut evals = 0u64;
    let mut x = x0.to_vec();
    bounds.project(&mut x);
    let mut fx = f0;
    let mut best_x = x.clone();
    let mut best_f = fx;
    let mut h = identity(n);
    let mut first_step = true;
    let mut grad_norm = None;

    let gradient = |f: &mut F, x: &[f64], evals: &mut u64| -> Vec<f64> {
        let mut g = vec![0.0; n];
        let mut probe = x.to_vec();
        for j in 0..n {
            let step = FD_STEP * x[j].abs().max(1.0);
            let up = (x[j] + step).min(hi[j]);
            let down = (x[j] - step).max(lo[j]);
            probe[j] = up;
            let fu = f(&probe);
            probe[j] = down;
            let fd = f(&probe);
            probe[j] = x[j];
            *evals += 2;
            g[j] = if up > down { (fu - fd) / (up - down) } else { 0.0 };
        }
        g
    };

    if evals + 2 * n as u64 > budget {
        return QuasiNewtonResult {
            x: best_x,
            f: best_f,
            evaluations: evals,
            grad_norm,
            stop: StopReason::Budget,
        };
    }
    let mut g = gradient(f, &x, &mut evals);

    let stop = loop {
        let pg = projected(&g, &x, lo, hi);
        let pg_norm = norm(&pg);
        grad_norm = Some(pg_norm);
        if !pg_norm.is_finite() {
            break StopReason::Gradient;
        }
        if pg_norm < GRAD_TOL {
            break StopReason::Gradient;
        }

        let mut d = mat_vec(&h, &pg).into_iter().map(|v| -v).collect::<Vec<_>>();
        for j in 0..n {
            if pg[j] == 0.0 {
                d[j] = 0.0;
            }
        }
        if dot(&d, &g) >= 0.0 {
            h = identity(n);
            d = pg.iter().map(|v| -v).collect();
        }
        if first_step {
            // unit steepest-descent steps are badly scaled on the first
            // iteration; aim for a move comparable to the box size
            let dn = norm(&d);
            let span = lo.iter().zip(hi).map(|(a, b)| b - a).fold(0.0, f64::max);
            if dn > span {
                d.iter_mut().for_each(|v| *v *= span / dn);
            }
        }

        let slope = dot(&g, &d);
        // trial point at step `alpha`; `None` if the move is negligible
        let point = |alpha: f64| {
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
            let clipped = !bounds.contains(&trial);
            bounds.project(&mut trial);
            let s: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
            (norm(&s) >= STEP_TOL).then_some((trial, s, clipped))
        };
        // minimizer of the quadratic through f(0), f'(0) and f(alpha)
        let model_min = |alpha: f64, fa: f64| {
            let c = (fa - fx - slope * alpha) / (alpha * alpha);
            (c > 0.0).then(|| -slope / (2.0 * c))
        };

        let mut alpha = 1.0;
        let mut accepted = None;
        let mut tiny_step = false;
        while evals < budget {
            let Some((trial, s, clipped)) = point(alpha) else {
                tiny_step = true;
                break;
            };
            let ft = f(&trial);
            evals += 1;
            if ft < best_f {
                best_f = ft;
                best_x = trial.clone();
            }
            if ft <= fx + ARMIJO_C * dot(&g, &s) {
                accepted = Some((trial, ft, s));
                // move toward the minimizer of the line model, expanding while
                // the function keeps decreasing
                let (mut cur_alpha, mut cur_f, mut cur_clipped) = (alpha, ft, clipped);
                for _ in 0..MAX_EXPANSIONS {
                    if cur_clipped || evals >= budget {
                        break;
                    }
                    let next = match model_min(cur_alpha, cur_f) {
                        Some(a) if (a / cur_alpha - 1.0).abs() <= 0.1 => break,
                        Some(a) => a.min(4.0 * cur_alpha),
                        None => 4.0 * cur_alpha,
                    };
                    let Some((t2, s2, c2)) = point(next) else { break };
                    let f2 = f(&t2);
                    evals += 1;
                    if f2 < best_f {
                        best_f = f2;
                        best_x = t2.clone();
                    }
                    if !(f2 < cur_f && f2 <= fx + ARMIJO_C * dot(&g, &s2)) {
                        break;
                    }
                    accepted = Some((t2, f2, s2));
                    let shrank = next < cur_alpha;
                    (cur_alpha, cur_f, cur_clipped) = (next, f2, c2);
                    if shrank {
                        break;
                    }
                }
                break;
            }
            alpha = match model_min(alpha, ft).filter(|_| !clipped) {
                Some(a) => a.clamp(0.1 * alpha, 0.5 * alpha),
                None => 0.5 * alpha,
            };
        }
        let Some((x_new, f_new, s)) = accepted else {
            break if tiny_step { StopReason::Step } else { StopReason::Budget };
        };

        x = x_new;
        fx = f_new;
        if evals + 2 * n as u64 > budget {
            grad_norm = None;
            break StopReason::Budget;
        }
        let g_new = gradient(f, &x, &mut evals);
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) && sy > 0.0 {
            if first_step {
                let scale = sy / dot(&y, &y);
                h = identity(n);
                h.iter_mut().for_each(|row| row.iter_mut().for_each(|v| *v *= scale));
            }
            bfgs_update(&mut h, &s, &y, sy);
        }
        first_step = false;
        g = g_new;
    };

    if best_f < fx {
        // best point came from a rejected line-search probe
        grad_norm = None;
    }
    QuasiNewtonResult {
        x: best_x,
        f: best_f,
        evaluations: evals,
        grad_norm,
        stop,
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Zeroes gradient components that point out of the box at an active bound.
fn projected(g: &[f64], x: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    g.iter()
        .enumerate()
        .map(|(j, &gj)| {
            if (x[j] <= lo[j] && gj > 0.0) || (x[j] >= hi[j] && gj < 0.0) {
                0.0
            } else {
                gj
            }
        })
        .collect()
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`, `ρ = 1 / sᵀy`.
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSearchState {
    pub probability: f64,
    /// Evaluation budget per invocation.
    pub budget: u64,
    /// Fraction of the total budget after which local search may run.
    pub active_after: f64,
}

impl LocalSearchState {
    pub fn new(nfes_max: u64) -> Self {
        Self {
            probability: P_LS_LOW,
            budget: ((0.01 * nfes_max as f64).round() as u64).max(1),
            active_after: 0.85,
        }
    }

    pub fn is_active(&self, nfes: u64, nfes_max: u64) -> bool {
        nfes as f64 >= self.active_after * nfes_max as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchOutcome {
    /// Whether the probability draw fired and a search ran.
    pub fired: bool,
    /// Strictly better replacement for the incumbent, if one was found.
    pub refined: Option<Individual>,
    pub evaluations: u64,
}

/// Runs the quasi-Newton search from `best` with probability
/// `state.probability`, using at most `min(state.budget, remaining)`
/// evaluations. Success raises the probability to 0.1, failure drops it to
/// 0.01; a draw that does not fire leaves everything untouched.
pub fn maybe_local_search<R, F>(
    best: &Individual,
    f: F,
    bounds: &Bounds,
    state: &mut LocalSearchState,
    remaining: u64,
    rng: &mut R,
) -> LocalSearchOutcome
where
    R: Rng + ?Sized,
    F: FnMut(&[f64]) -> f64,
{
    let skipped = LocalSearchOutcome {
        fired: false,
        refined: None,
        evaluations: 0,
    };
    if rng.random::<f64>() >= state.probability {
        return skipped;
    }
    let budget = state.budget.min(remaining);
    if budget < min_budget(best.x.len()) {
        return skipped;
    }
    let mut f = f;
    let res = quasi_newton_from(&mut f, bounds, &best.x, best.fitness, budget);
    let refined = if res.f < best.fitness {
        state.probability = P_LS_HIGH;
        Some(Individual::new(res.x, res.f))
    } else {
        state.probability = P_LS_LOW;
        None
    };
    LocalSearchOutcome {
        fired: true,
        refined,
        evaluations: res.evaluations,
    }
}
