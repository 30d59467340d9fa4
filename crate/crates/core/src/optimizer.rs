//! One complete optimization run and batches of independent runs.
//!
//! Each generation:
//!
//! 1. update the sinusoid selector and assign a mutation strategy to every
//!    individual;
//! 2. for every individual sample F and CR, mutate, cross over (binomial or
//!    covariance-learning) and evaluate the trial;
//! 3. greedy selection with archive insertion, stagnation counters, then the
//!    strategy-probability, sinusoid and memory updates;
//! 4. sort, compute the volume metric, replace stagnant individuals;
//! 5. late-phase local search on the best individual;
//! 6. linear population size reduction.
//!
//! Every objective call counts against the budget, including restart and
//! local-search evaluations.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptation::{
    lpsr, sample_cr, sample_f, FSource, ParameterMemory, SinusoidSelector, StrategyState,
};
use crate::cml::{choose_crossover, cml_crossover, CmlBasis, CmlConfig, CrossoverKind};
use crate::engine::{
    binomial_crossover, initialize_population, mutate, select, weighted_f, Archive, Individual,
    Population, StrategyKind, MIN_POPULATION,
};
use crate::error::{Error, Result};
use crate::local_search::{maybe_local_search, LocalSearchState};
use crate::problem::Objective;
use crate::restart::{apply_restart, StagnationTracker};

/// Errors at or below this are reported as exactly zero.
pub const ERROR_THRESHOLD: f64 = 1e-8;

pub fn threshold_error(e: f64) -> f64 {
    if e <= ERROR_THRESHOLD {
        0.0
    } else {
        e
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub nfes_max: u64,
    pub n_init: usize,
    pub n_min: usize,
    pub seed: u64,
    pub memory_size: usize,
    pub cml: CmlConfig,
    /// Fraction of the population pbest is drawn from.
    pub p_best: f64,
    pub learning_period: usize,
    pub epsilon: f64,
    /// Frequency of the non-adaptive sinusoid.
    pub fixed_freq: f64,
    /// Archive capacity as a multiple of the population size.
    pub archive_rate: f64,
    /// Stagnation threshold is `stagnation_factor · dim` generations.
    pub stagnation_factor: u32,
    pub vol_threshold: f64,
    pub ls_active_after: f64,
    pub ls_initial_probability: f64,
    /// Per-invocation local-search budget as a fraction of `nfes_max`.
    pub ls_budget_rate: f64,
    pub restart: bool,
    pub local_search: bool,
    /// Restrict mutation to one strategy.
    pub strategy: Option<StrategyKind>,
    pub record_trace: bool,
}

impl RunConfig {
    /// Defaults for dimension `dim`: budget `10000·dim`, population `18·dim`
    /// shrinking to 4.
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            nfes_max: 10_000 * dim as u64,
            n_init: 18 * dim,
            n_min: MIN_POPULATION,
            seed: 0,
            memory_size: 5,
            cml: CmlConfig::default(),
            p_best: 0.11,
            learning_period: 20,
            epsilon: 0.01,
            fixed_freq: 0.5,
            archive_rate: 2.6,
            stagnation_factor: 2,
            vol_threshold: crate::restart::VOLUME_THRESHOLD,
            ls_active_after: 0.85,
            ls_initial_probability: crate::local_search::P_LS_LOW,
            ls_budget_rate: 0.01,
            restart: true,
            local_search: true,
            strategy: None,
            record_trace: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, nfes_max: u64) -> Self {
        self.nfes_max = nfes_max;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.record_trace = on;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        variant.apply(&mut self);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.dim == 0 {
            return fail("dimension must be positive".into());
        }
        if self.n_min < MIN_POPULATION {
            return fail(format!("minimum population must be at least {MIN_POPULATION}"));
        }
        if self.n_init < self.n_min {
            return fail(format!(
                "initial population {} is below the minimum {}",
                self.n_init, self.n_min
            ));
        }
        if self.nfes_max < self.n_init as u64 {
            return fail(format!(
                "budget {} cannot cover the initial population of {}",
                self.nfes_max, self.n_init
            ));
        }
        if self.memory_size == 0 {
            return fail("memory size must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.cml.pc) || !(self.cml.ps > 0.0 && self.cml.ps <= 1.0) {
            return fail("crossover probabilities out of range".into());
        }
        if !(self.p_best > 0.0 && self.p_best <= 1.0) {
            return fail("p_best must lie in (0, 1]".into());
        }
        if self.archive_rate.is_nan() || self.archive_rate < 0.0 {
            return fail("archive rate must be non-negative".into());
        }
        Ok(())
    }

    fn archive_capacity(&self, pop_size: usize) -> usize {
        (self.archive_rate * pop_size as f64).round() as usize
    }
}

/// Ablations of the full algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Full,
    NoRestart,
    NoLocalSearch,
    SingleStrategy(StrategyKind),
    BinomialOnly,
}

impl Variant {
    pub fn apply(self, cfg: &mut RunConfig) {
        match self {
            Variant::Full => {}
            Variant::NoRestart => cfg.restart = false,
            Variant::NoLocalSearch => cfg.local_search = false,
            Variant::SingleStrategy(k) => cfg.strategy = Some(k),
            Variant::BinomialOnly => cfg.cml.pc = 0.0,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Full => f.write_str("full"),
            Variant::NoRestart => f.write_str("no-restart"),
            Variant::NoLocalSearch => f.write_str("no-local-search"),
            Variant::SingleStrategy(k) => write!(f, "single-strategy-{}", k.to_string().to_lowercase()),
            Variant::BinomialOnly => f.write_str("binomial-only"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = match s.trim().to_ascii_lowercase().as_str() {
            "full" => Variant::Full,
            "no-restart" => Variant::NoRestart,
            "no-local-search" => Variant::NoLocalSearch,
            "binomial-only" => Variant::BinomialOnly,
            "single-strategy-ms1" => Variant::SingleStrategy(StrategyKind::Ms1),
            "single-strategy-ms2" => Variant::SingleStrategy(StrategyKind::Ms2),
            "single-strategy-ms3" => Variant::SingleStrategy(StrategyKind::Ms3),
            other => return Err(Error::Config(format!("unknown variant `{other}`"))),
        };
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub nfes: u64,
    pub best_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub best_x: Vec<f64>,
    pub best_f: f64,
    /// `|best_f − f*|` thresholded at 1e-8, when the optimum is known.
    pub error: Option<f64>,
    pub evaluations: u64,
    pub generations: u64,
    pub final_population: usize,
    /// Individuals replaced by the restart mechanism.
    pub restarts: u64,
    pub local_searches: u64,
    pub local_search_improvements: u64,
    pub cml_uses: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TracePoint>,
}

impl RunRecord {
    /// Error if known, otherwise the raw best value.
    pub fn reported_error(&self) -> f64 {
        self.error.unwrap_or(self.best_f)
    }
}

/// State visible to an observer after each generation (and once after
/// initialization, with `generation == 0`).
#[derive(Debug)]
pub struct GenerationSnapshot<'a> {
    pub generation: u64,
    pub nfes: u64,
    pub population: &'a Population,
    pub archive: &'a Archive,
    pub strategy_probs: [f64; 3],
    pub sinusoid_probs: [f64; 2],
    pub memory: &'a ParameterMemory,
    pub best_f: f64,
}

/// Named random streams derived from one seed, so that each mechanism's
/// draws are independent of how many draws the others make.
struct Streams {
    init: ChaCha8Rng,
    adapt: ChaCha8Rng,
    mutation: ChaCha8Rng,
    crossover: ChaCha8Rng,
    selection: ChaCha8Rng,
    restart: ChaCha8Rng,
    local: ChaCha8Rng,
}

impl Streams {
    fn new(seed: u64) -> Self {
        let fork = |stream: u64| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(stream);
            r
        };
        Self {
            init: fork(0),
            adapt: fork(1),
            mutation: fork(2),
            crossover: fork(3),
            selection: fork(4),
            restart: fork(5),
            local: fork(6),
        }
    }
}

struct Counter<'a, O: ?Sized> {
    problem: &'a O,
    used: u64,
}

impl<O: Objective + ?Sized> Counter<'_, O> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.used += 1;
        self.problem.evaluate(x)
    }
}

pub fn run<O: Objective + ?Sized>(problem: &O, cfg: &RunConfig) -> Result<RunRecord> {
    run_observed(problem, cfg, |_| {})
}

/// [`run`] with a callback invoked after every generation.
pub fn run_observed<O, F>(problem: &O, cfg: &RunConfig, mut observe: F) -> Result<RunRecord>
where
    O: Objective + ?Sized,
    F: FnMut(&GenerationSnapshot<'_>),
{
    cfg.validate()?;
    if problem.dim() != cfg.dim {
        return Err(Error::Config(format!(
            "problem `{}` has dimension {}, configuration says {}",
            problem.name(),
            problem.dim(),
            cfg.dim
        )));
    }
    let bounds = problem.bounds().clone();
    let nfes_max = cfg.nfes_max;
    let mut rng = Streams::new(cfg.seed);
    let mut counter = Counter { problem, used: 0 };

    let mut pop = initialize_population(&bounds, cfg.n_init, &mut rng.init, |x| counter.eval(x))?;
    let mut archive = Archive::from_population(&pop, cfg.archive_capacity(cfg.n_init), &mut rng.init);
    pop.sort_by_fitness();

    let mut memory = ParameterMemory::new(cfg.memory_size);
    let mut selector = SinusoidSelector::new(cfg.learning_period, cfg.epsilon);
    let mut strategies = match cfg.strategy {
        Some(k) => StrategyState::pinned(k),
        None => StrategyState::default(),
    };
    let mut tracker = StagnationTracker::new(pop.len(), cfg.dim);
    tracker.count_threshold = cfg.stagnation_factor * cfg.dim as u32;
    tracker.vol_threshold = cfg.vol_threshold;
    let mut ls_state = LocalSearchState::new(nfes_max);
    ls_state.probability = cfg.ls_initial_probability;
    ls_state.active_after = cfg.ls_active_after;
    ls_state.budget = ((cfg.ls_budget_rate * nfes_max as f64).round() as u64).max(1);

    let g_max = (nfes_max / cfg.n_init as u64).max(1);
    let mut record = RunRecord {
        seed: cfg.seed,
        best_x: Vec::new(),
        best_f: f64::INFINITY,
        error: None,
        evaluations: 0,
        generations: 0,
        final_population: 0,
        restarts: 0,
        local_searches: 0,
        local_search_improvements: 0,
        cml_uses: 0,
        trace: Vec::new(),
    };
    if cfg.record_trace {
        record.trace.push(TracePoint {
            nfes: counter.used,
            best_f: pop.members[0].fitness,
        });
    }
    observe(&GenerationSnapshot {
        generation: 0,
        nfes: counter.used,
        population: &pop,
        archive: &archive,
        strategy_probs: strategies.probs,
        sinusoid_probs: selector.probs,
        memory: &memory,
        best_f: pop.members[0].fitness,
    });

    let mut g = 0u64;
    while counter.used < nfes_max {
        g += 1;
        pop.generation = g;
        let n = pop.len();
        selector.update(g);
        let assignments = strategies.assign(n, &mut rng.adapt);
        let mut basis: Option<Option<CmlBasis>> = None;

        struct Trial {
            ind: Individual,
            f: f64,
            cr: f64,
            source: FSource,
        }
        let mut trials = Vec::with_capacity(n);
        for (i, &kind) in assignments.iter().enumerate() {
            let (f, source) = sample_f(&memory, &selector, g, g_max, cfg.fixed_freq, &mut rng.adapt);
            let cr = sample_cr(&memory, &mut rng.adapt);
            let fw = weighted_f(f, counter.used, nfes_max);
            let v = mutate(kind, i, &pop, &archive, f, fw, cfg.p_best, &bounds, &mut rng.mutation)?;
            let target = &pop.members[i].x;
            let u = match choose_crossover(&cfg.cml, &mut rng.crossover) {
                CrossoverKind::Binomial => binomial_crossover(target, &v, cr, &mut rng.crossover),
                CrossoverKind::Cml => {
                    let b = basis
                        .get_or_insert_with(|| match CmlBasis::from_population(&pop, &cfg.cml) {
                            Ok(b) => Some(b),
                            Err(e) => {
                                log::debug!("generation {g}: no covariance basis ({e})");
                                None
                            }
                        })
                        .as_ref();
                    if b.is_some() {
                        record.cml_uses += 1;
                    }
                    cml_crossover(target, &v, b, cr, &bounds, &mut rng.crossover)
                }
            };
            let fu = counter.eval(&u)?;
            trials.push(Trial {
                ind: Individual::new(u, fu),
                f,
                cr,
                source,
            });
        }

        let old_fitness: Vec<f64> = pop.members.iter().map(|m| m.fitness).collect();
        let trial_fitness: Vec<f64> = trials.iter().map(|t| t.ind.fitness).collect();
        tracker.record(&trial_fitness, &old_fitness)?;

        let (mut s_f, mut s_cr, mut deltas) = (Vec::new(), Vec::new(), Vec::new());
        let (mut s_freq, mut freq_deltas) = (Vec::new(), Vec::new());
        let mut successes = [0u32; 2];
        let mut failures = [0u32; 2];
        let parents = std::mem::take(&mut pop.members);
        for (parent, trial) in parents.into_iter().zip(trials) {
            let parent_f = parent.fitness;
            let (survivor, improved) = select(parent, trial.ind, &mut archive, &mut rng.selection);
            if improved {
                let delta = parent_f - survivor.fitness;
                s_f.push(trial.f);
                s_cr.push(trial.cr);
                deltas.push(delta);
                if let FSource::Sinusoid2 { freq } = trial.source {
                    s_freq.push(freq);
                    freq_deltas.push(delta);
                }
            }
            if let Some(j) = trial.source.sinusoid_index() {
                if improved {
                    successes[j] += 1;
                } else {
                    failures[j] += 1;
                }
            }
            pop.members.push(survivor);
        }
        let new_fitness: Vec<f64> = pop.members.iter().map(|m| m.fitness).collect();
        strategies.update(&old_fitness, &new_fitness, &assignments)?;
        memory.update(&s_f, &s_cr, &deltas, &s_freq, &freq_deltas)?;
        selector.record(successes, failures);

        let perm = pop.sort_by_fitness();
        tracker.permute(&perm);
        tracker.update_volume(&pop, &bounds);

        if cfg.restart {
            let remaining = nfes_max.saturating_sub(counter.used);
            let report = apply_restart(
                &mut pop,
                &mut tracker,
                &bounds,
                &mut archive,
                remaining,
                &mut rng.restart,
                |x| counter.eval(x),
            )?;
            if !report.replaced.is_empty() {
                record.restarts += report.replaced.len() as u64;
                let perm = pop.sort_by_fitness();
                tracker.permute(&perm);
            }
        }

        if cfg.local_search && ls_state.is_active(counter.used, nfes_max) {
            let remaining = nfes_max.saturating_sub(counter.used);
            let mut failure = None;
            let best = pop.members[0].clone();
            let outcome = maybe_local_search(
                &best,
                |x| match counter.eval(x) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::INFINITY
                    }
                },
                &bounds,
                &mut ls_state,
                remaining,
                &mut rng.local,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            if outcome.fired {
                record.local_searches += 1;
            }
            if let Some(refined) = outcome.refined {
                record.local_search_improvements += 1;
                pop.members[0] = refined;
            }
        }

        let target = lpsr(cfg.n_init, cfg.n_min, counter.used, nfes_max);
        if target < pop.len() {
            pop.truncate(target);
            tracker.truncate(target);
            archive.resize(cfg.archive_capacity(target), &mut rng.selection);
        }

        let best_f = pop.members[0].fitness;
        if cfg.record_trace {
            record.trace.push(TracePoint {
                nfes: counter.used,
                best_f,
            });
        }
        observe(&GenerationSnapshot {
            generation: g,
            nfes: counter.used,
            population: &pop,
            archive: &archive,
            strategy_probs: strategies.probs,
            sinusoid_probs: selector.probs,
            memory: &memory,
            best_f,
        });
    }

    let best = &pop.members[0];
    record.best_x = best.x.clone();
    record.best_f = best.fitness;
    record.error = problem
        .known_optimum()
        .map(|opt| threshold_error((best.fitness - opt).abs()));
    record.evaluations = counter.used;
    record.generations = g;
    record.final_population = pop.len();
    Ok(record)
}

/// `n_runs` independent runs seeded `base_seed + k`, executed in parallel and
/// returned in run order.
pub fn run_many<O>(problem: &O, cfg: &RunConfig, n_runs: usize, base_seed: u64) -> Result<Vec<RunRecord>>
where
    O: Objective + ?Sized,
{
    if n_runs == 0 {
        return Err(Error::invalid("n_runs must be at least 1"));
    }
    (0..n_runs)
        .into_par_iter()
        .map(|k| {
            let mut c = cfg.clone();
            c.seed = base_seed.wrapping_add(k as u64);
            run(problem, &c)
        })
        .collect()
}
