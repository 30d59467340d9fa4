//! Build a shifted and rotated Rastrigin from a data file, the way the
//! benchmark harness loads external shift/rotation data.

use mlshade::linalg::{eigen_symmetric, Matrix, SymmetricMatrix};
use mlshade::{run, Builtin, BuiltinKind, Objective, RunConfig, ShiftRotateProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random orthonormal matrix: eigenvectors of a random symmetric one.
fn random_rotation(dim: usize, rng: &mut ChaCha8Rng) -> mlshade::Result<Matrix> {
    let mut a = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let v = rng.random_range(-1.0..1.0);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    Ok(eigen_symmetric(&SymmetricMatrix::from_matrix(a)?)?.eigenvectors)
}

fn main() -> mlshade::Result<()> {
    let dim = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let shift: Vec<f64> = (0..dim).map(|_| rng.random_range(-80.0..80.0)).collect();
    let rotation = random_rotation(dim, &mut rng)?;

    let mut text = shift.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" ");
    text.push('\n');
    for i in 0..dim {
        let row: Vec<String> = rotation.row(i).iter().map(|v| format!("{v:e}")).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    let dir = std::env::temp_dir().join("mlshade-shift-rotate-example");
    std::fs::create_dir_all(&dir).map_err(|e| mlshade::Error::Io { path: dir.clone(), source: e })?;
    let path = dir.join("rastrigin_d10.txt");
    std::fs::write(&path, text).map_err(|e| mlshade::Error::Io { path: path.clone(), source: e })?;

    let base = Builtin::new(BuiltinKind::Rastrigin, dim)?;
    let problem = ShiftRotateProblem::from_file(Box::new(base), &path, 100.0)?.with_name("rastrigin (shifted, rotated)");
    println!("{}: f(shift) = {}", problem.name(), problem.evaluate(&shift)?);

    let rec = run(&problem, &RunConfig::new(dim).with_seed(1))?;
    let dist = rec.best_x.iter().zip(&shift).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    println!("error {:.3e} after {} evaluations, distance to shift {dist:.3e}", rec.reported_error(), rec.evaluations);
    println!("the same file works from the CLI: mlshade-bench run --problem rastrigin@rastrigin_d10.txt --data-dir {}", dir.display());
    Ok(())
}
