//! Population, archive and the DE operators: the three mutation strategies,
//! weighted scaling factor, binomial crossover, midpoint bound repair and
//! greedy selection.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::Bounds;

/// Smallest population the mutation strategies can draw distinct donors from.
pub const MIN_POPULATION: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub x: Vec<f64>,
    pub fitness: f64,
}

impl Individual {
    pub fn new(x: Vec<f64>, fitness: f64) -> Self {
        Self { x, fitness }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: u64,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Self {
        Self {
            members,
            generation: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members.first().map_or(0, |m| m.x.len())
    }

    /// Stable ascending sort by fitness. Returns the permutation applied:
    /// position `k` now holds the member previously at `perm[k]`.
    pub fn sort_by_fitness(&mut self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.members.len()).collect();
        perm.sort_by(|&a, &b| self.members[a].fitness.total_cmp(&self.members[b].fitness));
        let mut old: Vec<Option<Individual>> = self.members.drain(..).map(Some).collect();
        self.members = perm.iter().map(|&k| old[k].take().expect("permutation")).collect();
        perm
    }

    pub fn is_sorted(&self) -> bool {
        self.members.windows(2).all(|w| w[0].fitness <= w[1].fitness)
    }

    pub fn best_index(&self) -> usize {
        self.members
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.fitness.total_cmp(&b.1.fitness))
            .map_or(0, |(i, _)| i)
    }

    pub fn best(&self) -> &Individual {
        &self.members[self.best_index()]
    }

    /// Drops the tail of an already sorted population.
    pub fn truncate(&mut self, n: usize) {
        self.members.truncate(n);
    }
}

/// Uniform random population inside `bounds`, each member evaluated with `eval`.
pub fn initialize_population<R, F>(bounds: &Bounds, size: usize, rng: &mut R, mut eval: F) -> Result<Population>
where
    R: Rng + ?Sized,
    F: FnMut(&[f64]) -> Result<f64>,
{
    if size < MIN_POPULATION {
        return Err(Error::invalid(format!(
            "population size must be at least {MIN_POPULATION}, got {size}"
        )));
    }
    let mut members = Vec::with_capacity(size);
    for _ in 0..size {
        let x: Vec<f64> = bounds
            .lower()
            .iter()
            .zip(bounds.upper())
            .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
            .collect();
        let fitness = eval(&x)?;
        members.push(Individual { x, fitness });
    }
    Ok(Population::new(members))
}

/// Bounded pool of replaced parent vectors. Inserting into a full archive
/// overwrites a uniformly chosen member.
#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    members: Vec<Vec<f64>>,
    capacity: usize,
}

impl Archive {
    pub fn new(capacity: usize) -> Self {
        Self {
            members: Vec::with_capacity(capacity),
            capacity,
        }
    }

    /// Archive seeded with the vectors of `pop`.
    pub fn from_population<R: Rng + ?Sized>(pop: &Population, capacity: usize, rng: &mut R) -> Self {
        let mut archive = Self::new(capacity);
        for m in &pop.members {
            archive.insert(m.x.clone(), rng);
        }
        archive
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn members(&self) -> &[Vec<f64>] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.members[i]
    }

    pub fn insert<R: Rng + ?Sized>(&mut self, x: Vec<f64>, rng: &mut R) {
        if self.capacity == 0 {
            return;
        }
        if self.members.len() < self.capacity {
            self.members.push(x);
        } else {
            let k = rng.random_range(0..self.members.len());
            self.members[k] = x;
        }
    }

    /// Shrinks capacity, evicting random members until the archive fits.
    pub fn resize<R: Rng + ?Sized>(&mut self, capacity: usize, rng: &mut R) {
        self.capacity = capacity;
        while self.members.len() > capacity {
            let k = rng.random_range(0..self.members.len());
            self.members.swap_remove(k);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    /// current-to-pbest-weight/1 with archive
    Ms1,
    /// current-to-pbest/1 without archive
    Ms2,
    /// current-to-ordpbest-weight/1
    Ms3,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [StrategyKind::Ms1, StrategyKind::Ms2, StrategyKind::Ms3];

    pub fn index(self) -> usize {
        match self {
            StrategyKind::Ms1 => 0,
            StrategyKind::Ms2 => 1,
            StrategyKind::Ms3 => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StrategyKind::Ms1 => "MS1",
            StrategyKind::Ms2 => "MS2",
            StrategyKind::Ms3 => "MS3",
        };
        f.write_str(s)
    }
}

/// Time-dependent multiplier on F used by the weighted strategies.
pub fn weighted_f(f: f64, nfes: u64, nfes_max: u64) -> f64 {
    let progress = nfes as f64;
    let max = nfes_max as f64;
    if progress <= 0.2 * max {
        0.7 * f
    } else if progress <= 0.4 * max {
        0.8 * f
    } else {
        1.2 * f
    }
}

/// A donor taken from either the population or the archive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DonorRef {
    Population(usize),
    Archive(usize),
}

/// Indices chosen for one mutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Donors {
    Ms1 { pbest: usize, r1: usize, r2: DonorRef },
    Ms2 { pbest: usize, r1: usize, r3: usize },
    /// Candidates already ordered by fitness: best, median, worst.
    Ms3 { best: usize, mid: usize, worst: usize },
}

/// Size of the top set pbest is drawn from.
pub fn pbest_count(pop_size: usize, p: f64) -> usize {
    ((pop_size as f64 * p).round() as usize).clamp(2, pop_size.max(2))
}

fn pick_excluding<R: Rng + ?Sized>(n: usize, excluded: &[usize], rng: &mut R) -> usize {
    loop {
        let k = rng.random_range(0..n);
        if !excluded.contains(&k) {
            return k;
        }
    }
}

/// Draws donor indices for target `i` from a population sorted by fitness.
pub fn select_donors<R: Rng + ?Sized>(
    kind: StrategyKind,
    i: usize,
    pop: &Population,
    archive: &Archive,
    p: f64,
    rng: &mut R,
) -> Result<Donors> {
    let n = pop.len();
    if n < MIN_POPULATION {
        return Err(Error::Degenerate(format!(
            "mutation needs at least {MIN_POPULATION} individuals, population has {n}"
        )));
    }
    if i >= n {
        return Err(Error::invalid(format!("target index {i} out of range for {n}")));
    }
    let top = pbest_count(n, p);
    let pbest = rng.random_range(0..top);
    Ok(match kind {
        StrategyKind::Ms1 => {
            let r1 = pick_excluding(n, &[i], rng);
            let pool = n + archive.len();
            let r2 = pick_excluding(pool, &[i, r1], rng);
            let r2 = if r2 < n {
                DonorRef::Population(r2)
            } else {
                DonorRef::Archive(r2 - n)
            };
            Donors::Ms1 { pbest, r1, r2 }
        }
        StrategyKind::Ms2 => {
            let r1 = pick_excluding(n, &[i], rng);
            let r3 = pick_excluding(n, &[i, r1], rng);
            Donors::Ms2 { pbest, r1, r3 }
        }
        StrategyKind::Ms3 => {
            let r1 = pick_excluding(n, &[i, pbest], rng);
            let r2 = pick_excluding(n, &[i, pbest, r1], rng);
            let mut trio = [pbest, r1, r2];
            trio.sort_by(|&a, &b| {
                pop.members[a]
                    .fitness
                    .total_cmp(&pop.members[b].fitness)
                    .then(a.cmp(&b))
            });
            Donors::Ms3 {
                best: trio[0],
                mid: trio[1],
                worst: trio[2],
            }
        }
    })
}

/// `x + fw·(pbest − x) + f·(r1 − r2)`
pub fn current_to_pbest_weight(x: &[f64], pbest: &[f64], r1: &[f64], r2: &[f64], f: f64, fw: f64) -> Vec<f64> {
    (0..x.len())
        .map(|j| x[j] + fw * (pbest[j] - x[j]) + f * (r1[j] - r2[j]))
        .collect()
}

/// `x + f·(pbest − x + r1 − r3)`
pub fn current_to_pbest(x: &[f64], pbest: &[f64], r1: &[f64], r3: &[f64], f: f64) -> Vec<f64> {
    (0..x.len())
        .map(|j| x[j] + f * (pbest[j] - x[j] + r1[j] - r3[j]))
        .collect()
}

/// `x + fw·(best − x + mid − worst)`
pub fn current_to_ordpbest_weight(x: &[f64], best: &[f64], mid: &[f64], worst: &[f64], fw: f64) -> Vec<f64> {
    (0..x.len())
        .map(|j| x[j] + fw * (best[j] - x[j] + mid[j] - worst[j]))
        .collect()
}

/// Builds the mutant for donors already chosen, then repairs it into `bounds`.
pub fn mutant_from_donors(
    donors: &Donors,
    i: usize,
    pop: &Population,
    archive: &Archive,
    f: f64,
    fw: f64,
    bounds: &Bounds,
) -> Vec<f64> {
    let x = &pop.members[i].x;
    let at = |k: usize| pop.members[k].x.as_slice();
    let v = match *donors {
        Donors::Ms1 { pbest, r1, r2 } => {
            let r2 = match r2 {
                DonorRef::Population(k) => at(k),
                DonorRef::Archive(k) => archive.get(k),
            };
            current_to_pbest_weight(x, at(pbest), at(r1), r2, f, fw)
        }
        Donors::Ms2 { pbest, r1, r3 } => current_to_pbest(x, at(pbest), at(r1), at(r3), f),
        Donors::Ms3 { best, mid, worst } => current_to_ordpbest_weight(x, at(best), at(mid), at(worst), fw),
    };
    bound_repair(&v, x, bounds)
}

/// Mutant vector for target `i` under strategy `kind`. `pop` must be sorted
/// by fitness so the top-p slice holds the best members.
#[allow(clippy::too_many_arguments)]
pub fn mutate<R: Rng + ?Sized>(
    kind: StrategyKind,
    i: usize,
    pop: &Population,
    archive: &Archive,
    f: f64,
    fw: f64,
    p: f64,
    bounds: &Bounds,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let donors = select_donors(kind, i, pop, archive, p, rng)?;
    Ok(mutant_from_donors(&donors, i, pop, archive, f, fw, bounds))
}

/// Takes `mutant[j]` where `rand < cr` or `j == j_rand`, otherwise `target[j]`.
/// `j_rand` is drawn first, then one uniform per coordinate.
pub fn binomial_crossover<R: Rng + ?Sized>(target: &[f64], mutant: &[f64], cr: f64, rng: &mut R) -> Vec<f64> {
    debug_assert_eq!(target.len(), mutant.len());
    let j_rand = rng.random_range(0..target.len());
    target
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(j, (&t, &m))| {
            let u: f64 = rng.random();
            if u < cr || j == j_rand {
                m
            } else {
                t
            }
        })
        .collect()
}

/// Midpoint repair: an out-of-range coordinate moves halfway between the
/// violated bound and the target's coordinate.
pub fn bound_repair(v: &[f64], target: &[f64], bounds: &Bounds) -> Vec<f64> {
    v.iter()
        .zip(target)
        .zip(bounds.lower().iter().zip(bounds.upper()))
        .map(|((&vj, &tj), (&lo, &hi))| {
            if vj < lo {
                (lo + tj) / 2.0
            } else if vj > hi {
                (hi + tj) / 2.0
            } else {
                vj
            }
        })
        .collect()
}

/// Greedy one-to-one selection. The trial replaces the target only on strict
/// improvement, in which case the target's vector goes to the archive.
pub fn select<R: Rng + ?Sized>(
    target: Individual,
    trial: Individual,
    archive: &mut Archive,
    rng: &mut R,
) -> (Individual, bool) {
    if trial.fitness < target.fitness {
        archive.insert(target.x, rng);
        (trial, true)
    } else {
        (target, false)
    }
}
