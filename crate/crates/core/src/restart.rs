//! Stagnation detection and replacement.
//!
//! An individual is stagnant when its trial has failed to beat it for more
//! than `2·D` consecutive generations *and* the population volume metric is
//! below `0.001`. Stagnant members are overwritten by a horizontal crossover
//! with a random partner or a vertical crossover between two of their own
//! coordinates.

use rand::Rng;

use crate::engine::{bound_repair, Archive, Individual, Population};
use crate::error::{Error, Result};
use crate::problem::Bounds;

pub const VOLUME_THRESHOLD: f64 = 0.001;

#[derive(Debug, Clone, PartialEq)]
pub struct StagnationTracker {
    /// Consecutive non-improving generations, aligned with population order.
    pub counters: Vec<u32>,
    pub count_threshold: u32,
    pub vol_threshold: f64,
    /// Volume metric from the last [`StagnationTracker::update_volume`].
    pub vol: f64,
}

impl StagnationTracker {
    /// Tracker for `n` individuals in `dim` dimensions (threshold `2·dim`).
    pub fn new(n: usize, dim: usize) -> Self {
        Self {
            counters: vec![0; n],
            count_threshold: 2 * dim as u32,
            vol_threshold: VOLUME_THRESHOLD,
            vol: f64::INFINITY,
        }
    }

    /// Increments `count(i)` when the trial was strictly worse than its
    /// target, resets it otherwise.
    pub fn record(&mut self, trial_fitness: &[f64], target_fitness: &[f64]) -> Result<()> {
        if trial_fitness.len() != target_fitness.len() || trial_fitness.len() != self.counters.len() {
            return Err(Error::invalid("counter, trial and target lists are not aligned"));
        }
        for ((c, u), x) in self.counters.iter_mut().zip(trial_fitness).zip(target_fitness) {
            if u > x {
                *c += 1;
            } else {
                *c = 0;
            }
        }
        Ok(())
    }

    /// Reorders counters with the permutation returned by
    /// [`Population::sort_by_fitness`].
    pub fn permute(&mut self, perm: &[usize]) {
        self.counters = perm.iter().map(|&k| self.counters[k]).collect();
    }

    pub fn truncate(&mut self, n: usize) {
        self.counters.truncate(n);
    }

    pub fn update_volume(&mut self, pop: &Population, bounds: &Bounds) -> f64 {
        self.vol = volume_metric(pop, bounds);
        self.vol
    }

    pub fn is_stagnant(&self, i: usize) -> bool {
        self.counters[i] > self.count_threshold && self.vol < self.vol_threshold
    }
}

/// `sqrt(Vol_pop / Vol_bnd)` with `Vol_bnd = sqrt(Π (ub − lb))` and
/// `Vol_pop = sqrt(Σ (max_j − min_j) / 2)`. The product is evaluated in log
/// space.
pub fn volume_metric(pop: &Population, bounds: &Bounds) -> f64 {
    let dim = bounds.dim();
    let mut spread_sum = 0.0;
    for j in 0..dim {
        let (lo, hi) = pop
            .members
            .iter()
            .map(|m| m.x[j])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if hi > lo {
            spread_sum += hi - lo;
        }
    }
    if spread_sum <= 0.0 {
        return 0.0;
    }
    let ln_vol_pop = 0.5 * (spread_sum / 2.0).ln();
    let ln_vol_bnd = 0.5
        * bounds
            .lower()
            .iter()
            .zip(bounds.upper())
            .map(|(lo, hi)| (hi - lo).ln())
            .sum::<f64>();
    (0.5 * (ln_vol_pop - ln_vol_bnd)).exp()
}

/// `rd1·x1 + rd2·x2 + rnds·(x1 − x2)` per coordinate with `rd2 = 1 − rd1`.
pub fn horizontal_combine(x1: &[f64], x2: &[f64], rd1: &[f64], rnds: &[f64]) -> Vec<f64> {
    (0..x1.len())
        .map(|j| rd1[j] * x1[j] + (1.0 - rd1[j]) * x2[j] + rnds[j] * (x1[j] - x2[j]))
        .collect()
}

/// Horizontal crossover with coefficients drawn independently per dimension,
/// `rd1 ~ U[0,1]` and `rnds ~ U[-1,1]`; repaired towards `x1`.
pub fn horizontal_crossover<R: Rng + ?Sized>(x1: &[f64], x2: &[f64], bounds: &Bounds, rng: &mut R) -> Vec<f64> {
    let d = x1.len();
    let mut rd1 = Vec::with_capacity(d);
    let mut rnds = Vec::with_capacity(d);
    for _ in 0..d {
        rd1.push(rng.random_range(0.0..=1.0));
        rnds.push(rng.random_range(-1.0..=1.0));
    }
    bound_repair(&horizontal_combine(x1, x2, &rd1, &rnds), x1, bounds)
}

/// Copy of `x` with coordinate `d1` replaced by `rd1·x[d1] + (1 − rd1)·x[d2]`.
pub fn vertical_combine(x: &[f64], d1: usize, d2: usize, rd1: f64) -> Vec<f64> {
    let mut out = x.to_vec();
    out[d1] = rd1 * x[d1] + (1.0 - rd1) * x[d2];
    out
}

/// Vertical crossover between two distinct random dimensions.
pub fn vertical_crossover<R: Rng + ?Sized>(x: &[f64], bounds: &Bounds, rng: &mut R) -> Result<Vec<f64>> {
    let d = x.len();
    if d < 2 {
        return Err(Error::invalid("vertical crossover needs at least two dimensions"));
    }
    let d1 = rng.random_range(0..d);
    let d2 = loop {
        let k = rng.random_range(0..d);
        if k != d1 {
            break k;
        }
    };
    let rd1 = rng.random_range(0.0..=1.0);
    Ok(bound_repair(&vertical_combine(x, d1, d2, rd1), x, bounds))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RestartReport {
    /// Population indices that were overwritten.
    pub replaced: Vec<usize>,
    pub evaluations: u64,
}

/// Replaces every stagnant individual except the current best.
///
/// Replacement is unconditional; the displaced vector goes to the archive and
/// the new one is evaluated through `eval`. At most `max_evals` replacements
/// are made.
#[allow(clippy::too_many_arguments)]
pub fn apply_restart<R, F>(
    pop: &mut Population,
    tracker: &mut StagnationTracker,
    bounds: &Bounds,
    archive: &mut Archive,
    max_evals: u64,
    rng: &mut R,
    mut eval: F,
) -> Result<RestartReport>
where
    R: Rng + ?Sized,
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut report = RestartReport::default();
    if tracker.vol >= tracker.vol_threshold || pop.len() < 2 {
        return Ok(report);
    }
    let n = pop.len();
    let best = pop.best_index();
    for i in 0..n {
        if i == best || !tracker.is_stagnant(i) {
            continue;
        }
        if report.evaluations >= max_evals {
            break;
        }
        let x = &pop.members[i].x;
        let use_horizontal = x.len() < 2 || rng.random::<f64>() > 0.5;
        let candidate = if use_horizontal {
            let partner = loop {
                let k = rng.random_range(0..n);
                if k != i {
                    break k;
                }
            };
            horizontal_crossover(x, &pop.members[partner].x, bounds, rng)
        } else {
            vertical_crossover(x, bounds, rng)?
        };
        let fitness = eval(&candidate)?;
        report.evaluations += 1;
        let old = std::mem::replace(&mut pop.members[i], Individual::new(candidate, fitness));
        archive.insert(old.x, rng);
        tracker.counters[i] = 0;
        report.replaced.push(i);
    }
    Ok(report)
}
