//! Small dense linear algebra used by the covariance-learning crossover and
//! the shift-rotate problem wrapper.
//!
//! Matrices here are at most a few hundred entries on a side, so everything
//! is row-major `Vec<f64>` storage with straightforward loops.

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged rows"));
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest absolute entry of `self · selfᵀ − I`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in 0..self.rows {
                let dot: f64 = self.row(i).iter().zip(self.row(j)).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Matrix-vector product `m · x`.
pub fn transform(m: &Matrix, x: &[f64]) -> Result<Vec<f64>> {
    if m.cols != x.len() {
        return Err(Error::invalid(format!(
            "matrix has {} columns but vector has length {}",
            m.cols,
            x.len()
        )));
    }
    Ok((0..m.rows)
        .map(|i| m.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
        .collect())
}

/// `mᵀ · x` without materializing the transpose.
pub fn transform_transposed(m: &Matrix, x: &[f64]) -> Result<Vec<f64>> {
    if m.rows != x.len() {
        return Err(Error::invalid(format!(
            "matrix has {} rows but vector has length {}",
            m.rows,
            x.len()
        )));
    }
    let mut out = vec![0.0; m.cols];
    for (i, &xi) in x.iter().enumerate() {
        for (o, a) in out.iter_mut().zip(m.row(i)) {
            *o += a * xi;
        }
    }
    Ok(out)
}

/// Square matrix that is exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(Matrix);

impl SymmetricMatrix {
    /// Symmetrizes `(A + Aᵀ) / 2`.
    pub fn from_matrix(a: Matrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::invalid("symmetric matrix must be square"));
        }
        let mut a = a;
        let n = a.rows;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (a[(i, j)] + a[(j, i)]);
                a[(i, j)] = avg;
                a[(j, i)] = avg;
            }
        }
        Ok(Self(a))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

impl std::ops::Index<(usize, usize)> for SymmetricMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Sample covariance (denominator `n − 1`) of a point cloud.
pub fn covariance<P: AsRef<[f64]>>(points: &[P]) -> Result<SymmetricMatrix> {
    if points.len() < 2 {
        return Err(Error::Degenerate(format!(
            "covariance needs at least 2 points, got {}",
            points.len()
        )));
    }
    let dim = points[0].as_ref().len();
    if points.iter().any(|p| p.as_ref().len() != dim) {
        return Err(Error::invalid("points have mixed dimensions"));
    }
    let n = points.len() as f64;
    let mut mean = vec![0.0; dim];
    for p in points {
        for (m, v) in mean.iter_mut().zip(p.as_ref()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);

    let mut c = Matrix::zeros(dim, dim);
    let mut centered = vec![0.0; dim];
    for p in points {
        for ((c, v), m) in centered.iter_mut().zip(p.as_ref()).zip(&mean) {
            *c = v - m;
        }
        for i in 0..dim {
            for j in i..dim {
                c[(i, j)] += centered[i] * centered[j];
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            let v = c[(i, j)] / (n - 1.0);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    SymmetricMatrix::from_matrix(c)
}

/// `C = O · diag(λ) · Oᵀ`, eigenvalues descending, eigenvectors in columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvectors: Matrix,
    pub eigenvalues: Vec<f64>,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> Matrix {
        let n = self.eigenvalues.len();
        let mut out = Matrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            for i in 0..n {
                let a = lambda * self.eigenvectors[(i, k)];
                for j in 0..n {
                    out[(i, j)] += a * self.eigenvectors[(j, k)];
                }
            }
        }
        out
    }
}

pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps over every upper off-diagonal pair, annihilating each with a plane
/// rotation, until the largest off-diagonal magnitude drops below
/// [`JACOBI_TOLERANCE`] (scaled by the matrix norm when that exceeds one) or
/// [`JACOBI_MAX_SWEEPS`] sweeps have run.
///
/// Eigenvalues come back sorted descending; each eigenvector is signed so its
/// first nonzero component is positive.
pub fn eigen_symmetric(c: &SymmetricMatrix) -> Result<EigenDecomposition> {
    let n = c.dim();
    let mut a = c.matrix().clone();
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let mut v = Matrix::identity(n);
    let tol = JACOBI_TOLERANCE * a.frobenius_norm().max(1.0);

    let max_off = |a: &Matrix| {
        let mut m = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                m = m.max(a[(i, j)].abs());
            }
        }
        m
    };

    let mut converged = max_off(&a) < tol;
    let mut sweep = 0;
    while !converged && sweep < JACOBI_MAX_SWEEPS {
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Off-diagonal too small to change either diagonal entry.
                if sweep > 3 && app.abs() + 100.0 * apq.abs() == app.abs()
                    && aqq.abs() + 100.0 * apq.abs() == aqq.abs()
                {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                rotate(&mut a, &mut v, p, q, cs, sn);
            }
        }
        converged = max_off(&a) < tol;
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));

    let eigenvalues = order.iter().map(|&k| a[(k, k)]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let flip = (0..n)
            .map(|i| v[(i, src)])
            .find(|x| *x != 0.0)
            .is_some_and(|x| x < 0.0);
        let sign = if flip { -1.0 } else { 1.0 };
        for i in 0..n {
            eigenvectors[(i, dst)] = sign * v[(i, src)];
        }
    }
    Ok(EigenDecomposition {
        eigenvectors,
        eigenvalues,
    })
}

/// Applies the rotation `Jᵀ A J` on the (p, q) plane and accumulates `V J`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut impl Rng) -> SymmetricMatrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = rng.random_range(-5.0..5.0);
            }
        }
        SymmetricMatrix::from_matrix(m).unwrap()
    }

    fn relative_reconstruction_error(c: &SymmetricMatrix, e: &EigenDecomposition) -> f64 {
        let r = e.reconstruct();
        let diff: f64 = r
            .as_slice()
            .iter()
            .zip(c.matrix().as_slice())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        diff / c.matrix().frobenius_norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn covariance_of_two_points() {
        let c = covariance(&[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(c.matrix().as_slice(), &[2.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn covariance_identical_points_is_zero() {
        let pts = vec![vec![1.5, -2.0, 3.0]; 6];
        let c = covariance(&pts).unwrap();
        assert!(c.matrix().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn covariance_perfect_correlation() {
        let pts: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, i as f64]).collect();
        let c = covariance(&pts).unwrap();
        assert_eq!(c[(0, 1)], c[(0, 0)]);
        assert_eq!(c[(1, 0)], c[(1, 1)]);
    }

    #[test]
    fn covariance_needs_two_points() {
        assert!(matches!(covariance(&[vec![1.0]]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn eigen_identity() {
        let e = eigen_symmetric(&SymmetricMatrix::from_matrix(Matrix::identity(4)).unwrap()).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0; 4]);
        assert_eq!(e.eigenvectors, Matrix::identity(4));
    }

    #[test]
    fn eigen_diag_2_1() {
        let e = eigen_symmetric(&SymmetricMatrix::from_matrix(Matrix::diagonal(&[2.0, 1.0])).unwrap())
            .unwrap();
        assert_eq!(e.eigenvalues, vec![2.0, 1.0]);
        assert_eq!(e.eigenvectors, Matrix::identity(2));
    }

    #[test]
    fn eigen_diagonal_sorted_descending() {
        let vals = [0.5, -3.0, 7.25, 2.0, 0.0];
        let e = eigen_symmetric(&SymmetricMatrix::from_matrix(Matrix::diagonal(&vals)).unwrap())
            .unwrap();
        let expected = [7.25, 2.0, 0.5, 0.0, -3.0];
        for (got, want) in e.eigenvalues.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn eigen_random_10x10_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = random_symmetric(10, &mut rng);
        let e = eigen_symmetric(&c).unwrap();
        assert!(relative_reconstruction_error(&c, &e) < 1e-9);
        assert!(e.eigenvectors.orthonormality_defect() < 1e-10);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eigen_rejects_non_finite() {
        let mut m = Matrix::identity(2);
        m[(0, 0)] = f64::NAN;
        let c = SymmetricMatrix::from_matrix(m).unwrap();
        assert!(matches!(eigen_symmetric(&c), Err(Error::Numerical(_))));
    }

    #[test]
    fn covariance_eigenvalues_are_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let pts: Vec<Vec<f64>> = (0..8)
                .map(|_| (0..6).map(|_| rng.random_range(-100.0..100.0)).collect())
                .collect();
            let e = eigen_symmetric(&covariance(&pts).unwrap()).unwrap();
            assert!(e.eigenvalues.iter().all(|&l| l >= -1e-10 * e.eigenvalues[0].max(1.0)));
        }
    }

    #[test]
    fn transform_identity_and_rotation() {
        let x = [3.0, -1.0, 2.5];
        assert_eq!(transform(&Matrix::identity(3), &x).unwrap(), x.to_vec());
        let r90 = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(transform(&r90, &[1.0, 0.0]).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn transform_dimension_mismatch() {
        assert!(matches!(
            transform(&Matrix::identity(3), &[1.0, 2.0]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn transposed_product_matches_explicit_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = random_symmetric(6, &mut rng);
        let o = eigen_symmetric(&c).unwrap().eigenvectors;
        let x: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = transform_transposed(&o, &x).unwrap();
        let b = transform(&o.transpose(), &x).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert_abs_diff_eq!(p, q, epsilon = 1e-15);
        }
    }

    #[test]
    fn eigenbasis_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let c = random_symmetric(8, &mut rng);
        let o = eigen_symmetric(&c).unwrap().eigenvectors;
        for _ in 0..100 {
            let x: Vec<f64> = (0..8).map(|_| rng.random_range(-10.0..10.0)).collect();
            let back = transform(&o, &transform_transposed(&o, &x).unwrap()).unwrap();
            for (a, b) in back.iter().zip(&x) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }
}
