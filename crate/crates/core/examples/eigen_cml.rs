//! The covariance learning crossover step by step: neighborhood of the best,
//! covariance, eigenbasis, crossover in the rotated frame.

use mlshade::cml::{cml_crossover, neighborhood, CmlBasis, CmlConfig};
use mlshade::engine::{Individual, Population};
use mlshade::linalg::{covariance, eigen_symmetric};
use mlshade::Bounds;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> mlshade::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // points scattered along the diagonal of the plane
    let members: Vec<Individual> = (0..12)
        .map(|_| {
            let t: f64 = rng.random_range(-4.0..4.0);
            let e: f64 = rng.random_range(-0.3..0.3);
            let x = vec![t + e, t - e];
            let f = x.iter().map(|v| v * v).sum();
            Individual::new(x, f)
        })
        .collect();
    let mut pop = Population::new(members);
    pop.sort_by_fitness();

    let cfg = CmlConfig::default();
    let idx = neighborhood(&pop, cfg.ps);
    let points: Vec<&[f64]> = idx.iter().map(|&i| pop.members[i].x.as_slice()).collect();
    let cov = covariance(&points)?;
    let eig = eigen_symmetric(&cov)?;
    println!("neighborhood {idx:?}");
    println!("eigenvalues  {:.4?}", eig.eigenvalues);
    println!("principal    {:.4?}", eig.eigenvectors.column(0));

    let basis = CmlBasis::from_population(&pop, &cfg)?;
    let bounds = Bounds::uniform(2, -5.0, 5.0)?;
    let target = [2.0, 2.0];
    let mutant = [-1.0, 1.0];
    for cr in [0.0, 0.5, 1.0] {
        let u = cml_crossover(&target, &mutant, Some(&basis), cr, &bounds, &mut rng);
        println!("CR {cr:.1}: trial {u:.4?}");
    }
    Ok(())
}
