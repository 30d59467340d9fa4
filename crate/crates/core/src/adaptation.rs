//! Parameter self-adaptation.
//!
//! * success-history memories for F, CR and the adaptive sinusoid frequency,
//!   updated with a fitness-weighted Lehmer mean;
//! * the two-sinusoid F ensemble and its success-rate based selector;
//! * probabilities of the three mutation strategies, driven by relative
//!   fitness improvement;
//! * linear population size reduction.

use std::collections::VecDeque;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Cauchy, Distribution, Normal};

use crate::engine::StrategyKind;
use crate::error::{Error, Result};

pub const MEMORY_SIZE: usize = 5;
pub const MEMORY_INIT: f64 = 0.5;
/// Scale of the Cauchy/normal perturbations around memory entries.
pub const SAMPLING_SCALE: f64 = 0.1;

/// Circular success-history memories. All three share one write position.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterMemory {
    pub mu_f: Vec<f64>,
    pub mu_cr: Vec<f64>,
    pub mu_freq: Vec<f64>,
    pub write_pos: usize,
}

impl Default for ParameterMemory {
    fn default() -> Self {
        Self::new(MEMORY_SIZE)
    }
}

impl ParameterMemory {
    pub fn new(size: usize) -> Self {
        assert!(size > 0, "memory size must be positive");
        Self {
            mu_f: vec![MEMORY_INIT; size],
            mu_cr: vec![MEMORY_INIT; size],
            mu_freq: vec![MEMORY_INIT; size],
            write_pos: 0,
        }
    }

    pub fn size(&self) -> usize {
        self.mu_f.len()
    }

    fn random_slot<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(0..self.size())
    }

    /// Writes weighted Lehmer means of the successful values at the current
    /// position, then advances it. `deltas` weight `s_f`/`s_cr`;
    /// `freq_deltas` weight `s_freq`. Empty success lists leave their entry
    /// untouched; if nothing is written the position does not move.
    ///
    /// Returns whether anything was written.
    pub fn update(
        &mut self,
        s_f: &[f64],
        s_cr: &[f64],
        deltas: &[f64],
        s_freq: &[f64],
        freq_deltas: &[f64],
    ) -> Result<bool> {
        if s_f.len() != s_cr.len() || s_f.len() != deltas.len() {
            return Err(Error::invalid(format!(
                "success lists differ in length: F {}, CR {}, deltas {}",
                s_f.len(),
                s_cr.len(),
                deltas.len()
            )));
        }
        if s_freq.len() != freq_deltas.len() {
            return Err(Error::invalid(format!(
                "frequency successes ({}) and their deltas ({}) differ in length",
                s_freq.len(),
                freq_deltas.len()
            )));
        }
        if deltas.iter().chain(freq_deltas).any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::invalid("fitness improvements must be finite and positive"));
        }

        let k = self.write_pos;
        let mut written = false;
        if !s_f.is_empty() {
            self.mu_f[k] = weighted_lehmer_mean(s_f, deltas);
            self.mu_cr[k] = weighted_lehmer_mean(s_cr, deltas);
            written = true;
        }
        if !s_freq.is_empty() {
            self.mu_freq[k] = weighted_lehmer_mean(s_freq, freq_deltas);
            written = true;
        }
        if written {
            self.write_pos = (k + 1) % self.size();
        }
        Ok(written)
    }
}

/// `Σ w·s² / Σ w·s` with `w ∝ weights`. Zero when every value is zero.
pub fn weighted_lehmer_mean(values: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    let (num, den) = values
        .iter()
        .zip(weights)
        .fold((0.0, 0.0), |(n, d), (&s, &w)| {
            let w = w / total;
            (n + w * s * s, d + w * s)
        });
    if den > 0.0 {
        // keep rounding from leaving the [min, max] envelope
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (num / den).clamp(lo, hi)
    } else {
        0.0
    }
}

/// Which rule produced an individual's F.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FSource {
    /// Non-adaptive, decreasing-amplitude sinusoid.
    Sinusoid1,
    /// Adaptive, increasing-amplitude sinusoid with the sampled frequency.
    Sinusoid2 { freq: f64 },
    /// Cauchy around a memory entry (second half of the run).
    Cauchy,
}

impl FSource {
    pub fn sinusoid_index(self) -> Option<usize> {
        match self {
            FSource::Sinusoid1 => Some(0),
            FSource::Sinusoid2 { .. } => Some(1),
            FSource::Cauchy => None,
        }
    }
}

/// `0.5·(sin(π(2·fq·g + 1))·(g_max − g)/g_max + 1)`
pub fn sinusoid_decreasing(freq: f64, g: f64, g_max: f64) -> f64 {
    0.5 * ((PI * (2.0 * freq * g + 1.0)).sin() * (g_max - g) / g_max + 1.0)
}

/// `0.5·(sin(π(2·fq·g + 1))·g/g_max + 1)`
pub fn sinusoid_increasing(freq: f64, g: f64, g_max: f64) -> f64 {
    0.5 * ((PI * (2.0 * freq * g + 1.0)).sin() * g / g_max + 1.0)
}

/// Cauchy draw resampled while non-positive and truncated to 1.
fn cauchy_unit<R: Rng + ?Sized>(location: f64, rng: &mut R) -> f64 {
    let dist = Cauchy::new(location, SAMPLING_SCALE).expect("positive scale");
    loop {
        let v = dist.sample(rng);
        if v > 0.0 {
            return v.min(1.0);
        }
    }
}

/// Scaling factor for one individual at generation `g`.
///
/// In the first half (`g <= g_max / 2`) one of the two sinusoids is chosen
/// according to `selector`; later F is Cauchy around a random `mu_f` entry.
pub fn sample_f<R: Rng + ?Sized>(
    mem: &ParameterMemory,
    selector: &SinusoidSelector,
    g: u64,
    g_max: u64,
    fixed_freq: f64,
    rng: &mut R,
) -> (f64, FSource) {
    let r = mem.random_slot(rng);
    let (gf, gm) = (g as f64, g_max.max(1) as f64);
    if 2 * g <= g_max {
        if rng.random::<f64>() < selector.probs[0] {
            (sinusoid_decreasing(fixed_freq, gf, gm), FSource::Sinusoid1)
        } else {
            let freq = cauchy_unit(mem.mu_freq[r], rng);
            (sinusoid_increasing(freq, gf, gm), FSource::Sinusoid2 { freq })
        }
    } else {
        (cauchy_unit(mem.mu_f[r], rng), FSource::Cauchy)
    }
}

/// Crossover rate: normal around a random `mu_cr` entry, clipped to [0, 1].
pub fn sample_cr<R: Rng + ?Sized>(mem: &ParameterMemory, rng: &mut R) -> f64 {
    let r = mem.random_slot(rng);
    let dist = Normal::new(mem.mu_cr[r], SAMPLING_SCALE).expect("positive scale");
    dist.sample(rng).clamp(0.0, 1.0)
}

/// Success-rate based choice between the two sinusoidal F rules.
#[derive(Debug, Clone, PartialEq)]
pub struct SinusoidSelector {
    pub learning_period: usize,
    pub epsilon: f64,
    pub probs: [f64; 2],
    /// Per-generation (successes, failures) for each sinusoid, newest last.
    window: VecDeque<([u32; 2], [u32; 2])>,
}

impl Default for SinusoidSelector {
    fn default() -> Self {
        Self::new(20, 0.01)
    }
}

impl SinusoidSelector {
    pub fn new(learning_period: usize, epsilon: f64) -> Self {
        Self {
            learning_period,
            epsilon,
            probs: [0.5, 0.5],
            window: VecDeque::with_capacity(learning_period + 1),
        }
    }

    /// Records one generation's counts, dropping anything older than the
    /// learning period.
    pub fn record(&mut self, successes: [u32; 2], failures: [u32; 2]) {
        self.window.push_back((successes, failures));
        while self.window.len() > self.learning_period {
            self.window.pop_front();
        }
    }

    pub fn window_len(&self) -> usize {
        self.window.len()
    }

    /// Recomputes `probs` for generation `g` from the windowed counts.
    pub fn update(&mut self, g: u64) -> [f64; 2] {
        if g <= self.learning_period as u64 {
            self.probs = [0.5, 0.5];
            return self.probs;
        }
        let mut rates = [0.0; 2];
        for (j, rate) in rates.iter_mut().enumerate() {
            let ns: u64 = self.window.iter().map(|(s, _)| u64::from(s[j])).sum();
            let nf: u64 = self.window.iter().map(|(_, f)| u64::from(f[j])).sum();
            let base = if ns + nf > 0 {
                ns as f64 / (ns + nf) as f64
            } else {
                0.0
            };
            *rate = base + self.epsilon;
        }
        let total = rates[0] + rates[1];
        let p0 = rates[0] / total;
        self.probs = [p0, 1.0 - p0];
        self.probs
    }
}

pub const STRATEGY_PROB_MIN: f64 = 0.1;
pub const STRATEGY_PROB_MAX: f64 = 0.9;

/// Selection probabilities of the three mutation strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyState {
    /// Clamped probabilities; they need not sum to one.
    pub probs: [f64; 3],
    /// Improvement rates from the most recent update.
    pub improvements: [f64; 3],
    /// When set, every individual uses this strategy and probabilities are
    /// never adapted.
    pub pinned: Option<StrategyKind>,
}

impl Default for StrategyState {
    fn default() -> Self {
        Self {
            probs: [1.0 / 3.0; 3],
            improvements: [0.0; 3],
            pinned: None,
        }
    }
}

impl StrategyState {
    /// Always assigns `kind`; its probability is reported as one.
    pub fn pinned(kind: StrategyKind) -> Self {
        let mut probs = [0.0; 3];
        probs[kind.index()] = 1.0;
        Self {
            probs,
            improvements: [0.0; 3],
            pinned: Some(kind),
        }
    }

    /// Probabilities renormalized to sum to one.
    pub fn normalized(&self) -> [f64; 3] {
        let s: f64 = self.probs.iter().sum();
        self.probs.map(|p| p / s)
    }

    /// One uniform draw per individual against the cumulative thresholds.
    pub fn assign<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<StrategyKind> {
        if let Some(kind) = self.pinned {
            return vec![kind; n];
        }
        let q = self.normalized();
        (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                if u < q[0] {
                    StrategyKind::Ms1
                } else if u < q[0] + q[1] {
                    StrategyKind::Ms2
                } else {
                    StrategyKind::Ms3
                }
            })
            .collect()
    }

    /// Updates the probabilities from one generation's outcome.
    ///
    /// Each strategy's rate is its summed improvement `max(0, old − new)`
    /// over the summed magnitude of its parents' fitness; the share of the
    /// total rate is clamped to `[0.1, 0.9]`. With no improvement anywhere
    /// the probabilities reset to uniform.
    pub fn update(&mut self, old_fitness: &[f64], new_fitness: &[f64], assignments: &[StrategyKind]) -> Result<[f64; 3]> {
        if old_fitness.len() != new_fitness.len() || old_fitness.len() != assignments.len() {
            return Err(Error::invalid("fitness and assignment lists are not aligned"));
        }
        if self.pinned.is_some() {
            return Ok(self.probs);
        }
        let mut gain = [0.0; 3];
        let mut scale = [0.0; 3];
        for ((&old, &new), kind) in old_fitness.iter().zip(new_fitness).zip(assignments) {
            let k = kind.index();
            gain[k] += (old - new).max(0.0);
            scale[k] += old.abs();
        }
        let rates: [f64; 3] =
            std::array::from_fn(|k| if scale[k] > 0.0 { gain[k] / scale[k] } else { 0.0 });
        self.improvements = rates;
        let total: f64 = rates.iter().sum();
        self.probs = if total > 0.0 && total.is_finite() {
            rates.map(|r| (r / total).clamp(STRATEGY_PROB_MIN, STRATEGY_PROB_MAX))
        } else {
            [1.0 / 3.0; 3]
        };
        Ok(self.probs)
    }
}

/// Linear population size reduction:
/// `round(n_init + (n_min − n_init) · nfes / nfes_max)`.
pub fn lpsr(n_init: usize, n_min: usize, nfes: u64, nfes_max: u64) -> usize {
    let frac = nfes.min(nfes_max) as f64 / nfes_max.max(1) as f64;
    let n = n_init as f64 + (n_min as f64 - n_init as f64) * frac;
    (n.round() as usize).clamp(n_min, n_init)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn memory_defaults() {
        let m = ParameterMemory::default();
        assert_eq!(m.size(), 5);
        assert!(m.mu_f.iter().chain(&m.mu_cr).chain(&m.mu_freq).all(|&v| v == 0.5));
    }

    #[test]
    fn sinusoid1_zero_crossing() {
        // fq = 0.5, g = 1: 2·0.5·1 + 1 = 2, sin(2π) ≈ 0
        let f = sinusoid_decreasing(0.5, 1.0, 100.0);
        assert!((f - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sinusoid2_zero_amplitude() {
        assert_eq!(sinusoid_increasing(0.73, 0.0, 100.0), 0.5);
    }

    #[test]
    fn second_half_cauchy_distribution() {
        let mem = ParameterMemory::default();
        let sel = SinusoidSelector::default();
        let mut r = rng(1);
        let samples: Vec<f64> = (0..10_000)
            .map(|_| {
                let (f, src) = sample_f(&mem, &sel, 80, 100, 0.5, &mut r);
                assert_eq!(src, FSource::Cauchy);
                f
            })
            .collect();
        assert!(samples.iter().all(|&f| f > 0.0 && f <= 1.0));
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        // resampling non-positive draws moves the median to 0.5 + 0.1·tan(π·P(X≤0)/2)
        let p0 = 0.5 + (-5.0f64).atan() / std::f64::consts::PI;
        let expected = 0.5 + 0.1 * (std::f64::consts::PI * p0 / 2.0).tan();
        let median = sorted[sorted.len() / 2];
        assert!((median - expected).abs() < 0.01, "median {median}");
        let near = samples.iter().filter(|f| (**f - 0.5).abs() < 0.1).count();
        // Cauchy(0.5, 0.1) puts half its mass within one scale unit
        assert!(near as f64 / 10_000.0 > 0.45);
    }

    #[test]
    fn first_half_uses_sinusoids() {
        let mem = ParameterMemory::default();
        let sel = SinusoidSelector::default();
        let mut r = rng(2);
        let mut seen = [0; 2];
        for _ in 0..1000 {
            let (f, src) = sample_f(&mem, &sel, 10, 100, 0.5, &mut r);
            assert!(f > 0.0 && f <= 1.0);
            seen[src.sinusoid_index().unwrap()] += 1;
            if let FSource::Sinusoid2 { freq } = src {
                assert!(freq > 0.0 && freq <= 1.0);
            }
        }
        assert!(seen[0] > 400 && seen[1] > 400);
    }

    #[test]
    fn cr_sampling() {
        let mut mem = ParameterMemory::default();
        let mut r = rng(3);
        let mean = (0..10_000).map(|_| sample_cr(&mem, &mut r)).sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() < 0.01);
        mem.mu_cr = vec![0.0; 5];
        assert!((0..1000).all(|_| sample_cr(&mem, &mut r) >= 0.0));
        mem.mu_cr = vec![1.0; 5];
        assert!((0..1000).all(|_| sample_cr(&mem, &mut r) <= 1.0));
    }

    #[test]
    fn selector_learning_period() {
        let mut s = SinusoidSelector::new(20, 0.01);
        s.record([10, 0], [0, 10]);
        assert_eq!(s.update(20), [0.5, 0.5]);
    }

    #[test]
    fn selector_success_rates() {
        let mut s = SinusoidSelector::new(20, 0.01);
        s.record([10, 0], [0, 10]);
        let p = s.update(21);
        assert!((p[0] - 1.01 / 1.02).abs() < 1e-12);
        assert_eq!(p[0] + p[1], 1.0);
    }

    #[test]
    fn selector_no_information_is_even() {
        let mut s = SinusoidSelector::new(3, 0.01);
        for _ in 0..5 {
            s.record([0, 0], [4, 7]);
        }
        assert_eq!(s.update(50), [0.5, 0.5]);
        let mut empty = SinusoidSelector::new(3, 0.01);
        assert_eq!(empty.update(50), [0.5, 0.5]);
    }

    #[test]
    fn selector_window_forgets() {
        let mut s = SinusoidSelector::new(3, 0.01);
        s.record([100, 0], [0, 100]);
        for _ in 0..3 {
            s.record([0, 5], [5, 0]);
        }
        assert_eq!(s.window_len(), 3);
        let p = s.update(10);
        // only the last three generations count: sinusoid 2 always wins
        assert!((p[1] - 1.01 / 1.02).abs() < 1e-12);
    }

    #[test]
    fn memory_single_success() {
        let mut m = ParameterMemory::default();
        m.mu_f[0] = 0.9;
        assert!(m.update(&[0.5], &[0.3], &[1.0], &[], &[]).unwrap());
        assert_eq!(m.mu_f[0], 0.5);
        assert_eq!(m.mu_cr[0], 0.3);
        assert_eq!(m.mu_freq[0], 0.5);
        assert_eq!(m.write_pos, 1);
    }

    #[test]
    fn memory_lehmer_hand_value() {
        let mut m = ParameterMemory::default();
        m.update(&[0.2, 0.8], &[0.5, 0.5], &[3.0, 3.0], &[], &[]).unwrap();
        assert!((m.mu_f[0] - 0.68).abs() < 1e-12);
    }

    #[test]
    fn memory_untouched_without_successes() {
        let mut m = ParameterMemory::default();
        m.mu_f[2] = 0.77;
        m.write_pos = 2;
        let before = m.clone();
        assert!(!m.update(&[], &[], &[], &[], &[]).unwrap());
        assert_eq!(m, before);
    }

    #[test]
    fn memory_write_position_wraps() {
        let mut m = ParameterMemory::new(2);
        for _ in 0..3 {
            m.update(&[0.4], &[0.4], &[1.0], &[0.4], &[1.0]).unwrap();
        }
        assert_eq!(m.write_pos, 1);
    }

    #[test]
    fn memory_rejects_mismatch() {
        let mut m = ParameterMemory::default();
        assert!(m.update(&[0.1, 0.2], &[0.1], &[1.0, 1.0], &[], &[]).is_err());
        assert!(m.update(&[0.1], &[0.1], &[1.0], &[0.2], &[]).is_err());
        assert!(m.update(&[0.1], &[0.1], &[0.0], &[], &[]).is_err());
    }

    #[test]
    fn strategy_uniform_frequencies() {
        let s = StrategyState::default();
        let a = s.assign(100_000, &mut rng(4));
        for kind in StrategyKind::ALL {
            let frac = a.iter().filter(|&&k| k == kind).count() as f64 / a.len() as f64;
            assert!((frac - 1.0 / 3.0).abs() < 0.01, "{kind}: {frac}");
        }
    }

    #[test]
    fn strategy_renormalized_frequencies() {
        let s = StrategyState {
            probs: [0.9, 0.1, 0.1],
            ..StrategyState::default()
        };
        let a = s.assign(100_000, &mut rng(5));
        let expect = [0.9 / 1.1, 0.1 / 1.1, 0.1 / 1.1];
        for kind in StrategyKind::ALL {
            let frac = a.iter().filter(|&&k| k == kind).count() as f64 / a.len() as f64;
            assert!((frac - expect[kind.index()]).abs() < 0.01);
        }
        let s = StrategyState {
            probs: [0.1, 0.1, 0.9],
            ..StrategyState::default()
        };
        let a = s.assign(10_000, &mut rng(6));
        let ms3 = a.iter().filter(|&&k| k == StrategyKind::Ms3).count();
        assert!(ms3 > 7_000);
    }

    #[test]
    fn strategy_update_cases() {
        use StrategyKind::*;
        let assign = [Ms1, Ms1, Ms2, Ms3];
        let mut s = StrategyState::default();
        let p = s.update(&[10.0, 10.0, 10.0, 10.0], &[5.0, 10.0, 10.0, 10.0], &assign).unwrap();
        assert_eq!(p, [0.9, 0.1, 0.1]);

        let p = s.update(&[10.0, 10.0, 10.0, 10.0], &[5.0, 5.0, 5.0, 5.0], &assign).unwrap();
        for v in p {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }

        let p = s.update(&[10.0, 10.0, 10.0, 10.0], &[10.0, 10.0, 10.0, 12.0], &assign).unwrap();
        assert_eq!(p, [1.0 / 3.0; 3]);
    }

    #[test]
    fn pinned_strategy() {
        let mut s = StrategyState::pinned(StrategyKind::Ms2);
        assert!(s.assign(10, &mut rng(0)).iter().all(|&k| k == StrategyKind::Ms2));
        let before = s.probs;
        s.update(&[1.0], &[0.0], &[StrategyKind::Ms2]).unwrap();
        assert_eq!(s.probs, before);
    }

    #[test]
    fn lpsr_endpoints_and_midpoint() {
        assert_eq!(lpsr(540, 4, 0, 300_000), 540);
        assert_eq!(lpsr(540, 4, 300_000, 300_000), 4);
        assert_eq!(lpsr(100, 4, 50, 100), 52);
    }

    proptest! {
        #[test]
        fn lehmer_mean_within_range(
            pairs in proptest::collection::vec((0.0f64..=1.0, 1e-6f64..1e3), 1..20)
        ) {
            let (v, w): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let m = weighted_lehmer_mean(&v, &w);
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(m == 0.0 && hi == 0.0 || (lo..=hi).contains(&m));
        }

        #[test]
        fn memories_stay_in_range(seed in 0u64..500) {
            let mut r = rng(seed);
            let mut m = ParameterMemory::default();
            for _ in 0..50 {
                let n = r.random_range(0..6);
                let f: Vec<f64> = (0..n).map(|_| r.random_range(1e-9..=1.0)).collect();
                let cr: Vec<f64> = (0..n).map(|_| r.random_range(0.0..=1.0)).collect();
                let d: Vec<f64> = (0..n).map(|_| r.random_range(1e-12..1e6)).collect();
                let k = r.random_range(0..=n);
                m.update(&f, &cr, &d, &f[..k], &d[..k]).unwrap();
            }
            prop_assert!(m.mu_f.iter().chain(&m.mu_freq).all(|&v| v > 0.0 && v <= 1.0));
            prop_assert!(m.mu_cr.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }

        #[test]
        fn strategy_probs_clamped(
            old in proptest::collection::vec(-1e3f64..1e3, 12),
            new in proptest::collection::vec(-1e3f64..1e3, 12),
            seed in 0u64..100,
        ) {
            let mut s = StrategyState::default();
            let assign = s.assign(12, &mut rng(seed));
            let p = s.update(&old, &new, &assign).unwrap();
            prop_assert!(p.iter().all(|&v| (0.1..=0.9).contains(&v)));
        }

        #[test]
        fn lpsr_monotone(n_init in 4usize..600, a in 0u64..10_000, b in 0u64..10_000) {
            let (lo, hi) = (a.min(b), a.max(b));
            prop_assert!(lpsr(n_init, 4, lo, 10_000) >= lpsr(n_init, 4, hi, 10_000));
        }
    }
}
