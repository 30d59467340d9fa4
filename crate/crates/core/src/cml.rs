//! Covariance matrix learning crossover with a Euclidean neighborhood.
//!
//! The neighborhood is the `P_s` fraction of the population closest to the
//! current best. Its covariance eigenbasis `O` defines a rotated frame in
//! which ordinary binomial crossover is performed:
//!
//! ```text
//! t' = Oᵀ t,  v' = Oᵀ v,  u' = binomial(t', v', CR),  u = O u'
//! ```
//!
//! The basis is computed once per generation ([`CmlBasis::from_population`])
//! and reused for every individual that selects this crossover.

use rand::Rng;

use crate::engine::{binomial_crossover, bound_repair, Population};
use crate::error::Result;
use crate::linalg::{self, Matrix};
use crate::problem::Bounds;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmlConfig {
    /// Probability of using the covariance crossover instead of binomial.
    pub pc: f64,
    /// Neighborhood size as a fraction of the population.
    pub ps: f64,
}

impl Default for CmlConfig {
    fn default() -> Self {
        Self { pc: 0.4, ps: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossoverKind {
    Binomial,
    Cml,
}

pub fn choose_crossover<R: Rng + ?Sized>(cfg: &CmlConfig, rng: &mut R) -> CrossoverKind {
    if rng.random::<f64>() < cfg.pc {
        CrossoverKind::Cml
    } else {
        CrossoverKind::Binomial
    }
}

/// Indices of the `max(2, round(N·ps))` members nearest to the best one,
/// ordered by distance with ties broken by index.
pub fn neighborhood(pop: &Population, ps: f64) -> Vec<usize> {
    let n = pop.len();
    let size = ((n as f64 * ps).round() as usize).clamp(2.min(n), n);
    let best = &pop.members[pop.best_index()].x;
    let mut dist: Vec<(f64, usize)> = pop
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let d2: f64 = m.x.iter().zip(best).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2, i)
        })
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    dist.into_iter().take(size).map(|(_, i)| i).collect()
}

/// Orthonormal eigenbasis (columns) of the neighborhood covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct CmlBasis {
    basis: Matrix,
}

impl CmlBasis {
    pub fn from_population(pop: &Population, cfg: &CmlConfig) -> Result<Self> {
        let idx = neighborhood(pop, cfg.ps);
        let points: Vec<&[f64]> = idx.iter().map(|&i| pop.members[i].x.as_slice()).collect();
        let cov = linalg::covariance(&points)?;
        let eig = linalg::eigen_symmetric(&cov)?;
        Ok(Self {
            basis: eig.eigenvectors,
        })
    }

    /// Uses an explicit orthonormal basis.
    pub fn from_matrix(basis: Matrix) -> Self {
        Self { basis }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix(Matrix::identity(dim))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.basis
    }

    /// Binomial crossover in the rotated frame; the result is rotated back
    /// but not repaired.
    pub fn crossover<R: Rng + ?Sized>(&self, target: &[f64], mutant: &[f64], cr: f64, rng: &mut R) -> Result<Vec<f64>> {
        let t = linalg::transform_transposed(&self.basis, target)?;
        let v = linalg::transform_transposed(&self.basis, mutant)?;
        let u = binomial_crossover(&t, &v, cr, rng);
        linalg::transform(&self.basis, &u)
    }
}

/// Trial vector via the covariance crossover, or plain binomial crossover
/// when `basis` is unavailable (degenerate neighborhood). Always feasible.
pub fn cml_crossover<R: Rng + ?Sized>(
    target: &[f64],
    mutant: &[f64],
    basis: Option<&CmlBasis>,
    cr: f64,
    bounds: &Bounds,
    rng: &mut R,
) -> Vec<f64> {
    let u = match basis.map(|b| b.crossover(target, mutant, cr, rng)) {
        Some(Ok(u)) => u,
        Some(Err(e)) => {
            log::debug!("covariance crossover failed ({e}); using binomial");
            binomial_crossover(target, mutant, cr, rng)
        }
        None => binomial_crossover(target, mutant, cr, rng),
    };
    bound_repair(&u, target, bounds)
}
