//! Objective functions, search bounds, the built-in benchmark suite and the
//! shift-rotate wrapper for CEC-style problems.

use std::f64::consts::{E, PI};
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Box constraints `lower[j] <= x[j] <= upper[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::invalid("bounds must have at least one dimension"));
        }
        if lower.len() != upper.len() {
            return Err(Error::invalid(format!(
                "lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for (j, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::invalid(format!(
                    "dimension {j}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval on every axis.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// Clamps each coordinate into its interval.
    pub fn project(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

/// A deterministic, side-effect free objective to be minimized over a box.
///
/// Implementors provide [`Objective::value`]; callers that want argument
/// checking go through [`Objective::evaluate`].
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;

    fn bounds(&self) -> &Bounds;

    /// Objective value at the global optimum, when known. Used for error
    /// reporting only.
    fn known_optimum(&self) -> Option<f64> {
        None
    }

    /// Raw objective value. `x.len()` is assumed to match the bounds.
    fn value(&self, x: &[f64]) -> f64;

    fn dim(&self) -> usize {
        self.bounds().dim()
    }

    /// Checked evaluation: rejects wrong-length input and non-finite output.
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::invalid(format!(
                "`{}` expects {} variables, got {}",
                self.name(),
                self.dim(),
                x.len()
            )));
        }
        let v = self.value(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation {
                problem: self.name().to_string(),
                value: v,
            })
        }
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn bounds(&self) -> &Bounds {
        (**self).bounds()
    }
    fn known_optimum(&self) -> Option<f64> {
        (**self).known_optimum()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
}

/// Wraps a plain closure as an [`Objective`].
pub struct FnObjective<F> {
    name: String,
    bounds: Bounds,
    optimum: Option<f64>,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, bounds: Bounds, f: F) -> Self {
        Self {
            name: name.into(),
            bounds,
            optimum: None,
            f,
        }
    }

    pub fn with_known_optimum(mut self, value: f64) -> Self {
        self.optimum = Some(value);
        self
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }
    fn known_optimum(&self) -> Option<f64> {
        self.optimum
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

impl<F> fmt::Debug for FnObjective<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnObjective")
            .field("name", &self.name)
            .field("dim", &self.bounds.dim())
            .finish()
    }
}

/// Functions in the built-in suite. Two unimodal-separable, two unimodal
/// non-separable and three multimodal landscapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinKind {
    Sphere,
    Ellipsoid,
    Rosenbrock,
    Rastrigin,
    Ackley,
    Griewank,
    Schwefel12,
}

impl BuiltinKind {
    pub const ALL: [BuiltinKind; 7] = [
        BuiltinKind::Sphere,
        BuiltinKind::Ellipsoid,
        BuiltinKind::Rosenbrock,
        BuiltinKind::Rastrigin,
        BuiltinKind::Ackley,
        BuiltinKind::Griewank,
        BuiltinKind::Schwefel12,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinKind::Sphere => "sphere",
            BuiltinKind::Ellipsoid => "ellipsoid",
            BuiltinKind::Rosenbrock => "rosenbrock",
            BuiltinKind::Rastrigin => "rastrigin",
            BuiltinKind::Ackley => "ackley",
            BuiltinKind::Griewank => "griewank",
            BuiltinKind::Schwefel12 => "schwefel12",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Location of the global minimum in `dim` dimensions.
    pub fn optimum_point(self, dim: usize) -> Vec<f64> {
        match self {
            BuiltinKind::Rosenbrock => vec![1.0; dim],
            _ => vec![0.0; dim],
        }
    }

    fn eval(self, x: &[f64]) -> f64 {
        let d = x.len();
        match self {
            BuiltinKind::Sphere => x.iter().map(|v| v * v).sum(),
            BuiltinKind::Ellipsoid => {
                if d == 1 {
                    return x[0] * x[0];
                }
                x.iter()
                    .enumerate()
                    .map(|(i, v)| 10f64.powf(6.0 * i as f64 / (d - 1) as f64) * v * v)
                    .sum()
            }
            BuiltinKind::Rosenbrock => x
                .windows(2)
                .map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2))
                .sum(),
            BuiltinKind::Rastrigin => {
                10.0 * d as f64
                    + x.iter()
                        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
                        .sum::<f64>()
            }
            BuiltinKind::Ackley => {
                let n = d as f64;
                let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
                let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
                20.0 * (1.0 - (-0.2 * sq.sqrt()).exp()) + (E - cs.exp())
            }
            BuiltinKind::Griewank => {
                let s = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let p: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                1.0 + s - p
            }
            BuiltinKind::Schwefel12 => {
                let mut partial = 0.0;
                let mut total = 0.0;
                for v in x {
                    partial += v;
                    total += partial * partial;
                }
                total
            }
        }
    }
}

impl fmt::Display for BuiltinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A built-in benchmark function on `[-100, 100]^D` with optimum value 0.
#[derive(Debug, Clone)]
pub struct Builtin {
    kind: BuiltinKind,
    bounds: Bounds,
}

impl Builtin {
    pub fn new(kind: BuiltinKind, dim: usize) -> Result<Self> {
        Ok(Self {
            kind,
            bounds: Bounds::uniform(dim, -100.0, 100.0)?,
        })
    }

    pub fn by_name(name: &str, dim: usize) -> Result<Self> {
        let kind = BuiltinKind::from_name(name)
            .ok_or_else(|| Error::Config(format!("unknown builtin problem `{name}`")))?;
        Self::new(kind, dim)
    }

    pub fn kind(&self) -> BuiltinKind {
        self.kind
    }
}

impl Objective for Builtin {
    fn name(&self) -> &str {
        self.kind.name()
    }
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }
    fn known_optimum(&self) -> Option<f64> {
        Some(0.0)
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.kind.eval(x)
    }
}

/// Every built-in function at dimension `dim` (which must be at least 2).
pub fn builtin_suite(dim: usize) -> Result<Vec<Builtin>> {
    if dim < 2 {
        return Err(Error::invalid(format!(
            "builtin suite needs dim >= 2, got {dim}"
        )));
    }
    BuiltinKind::ALL
        .into_iter()
        .map(|k| Builtin::new(k, dim))
        .collect()
}

/// `f(x) = base(M · (x − o)) + bias`.
pub struct ShiftRotateProblem {
    name: String,
    base: Box<dyn Objective>,
    shift: Vec<f64>,
    rotation: Matrix,
    bias: f64,
}

impl ShiftRotateProblem {
    pub fn new(base: Box<dyn Objective>, shift: Vec<f64>, rotation: Matrix, bias: f64) -> Result<Self> {
        let d = base.dim();
        if shift.len() != d || rotation.rows() != d || rotation.cols() != d {
            return Err(Error::invalid(format!(
                "shift/rotation do not match base dimension {d}"
            )));
        }
        Ok(Self {
            name: format!("{}@shift-rotate", base.name()),
            base,
            shift,
            rotation,
            bias,
        })
    }

    /// Loads the transform from a data file (see [`load_shift_rotate`]).
    pub fn from_file(base: Box<dyn Objective>, path: impl AsRef<Path>, bias: f64) -> Result<Self> {
        let (shift, rotation) = load_shift_rotate(path, base.dim())?;
        Self::new(base, shift, rotation, bias)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn rotation(&self) -> &Matrix {
        &self.rotation
    }
}

impl fmt::Debug for ShiftRotateProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShiftRotateProblem")
            .field("name", &self.name)
            .field("bias", &self.bias)
            .finish()
    }
}

impl Objective for ShiftRotateProblem {
    fn name(&self) -> &str {
        &self.name
    }
    fn bounds(&self) -> &Bounds {
        self.base.bounds()
    }
    fn known_optimum(&self) -> Option<f64> {
        self.base.known_optimum().map(|v| v + self.bias)
    }
    fn value(&self, x: &[f64]) -> f64 {
        let z: Vec<f64> = x.iter().zip(&self.shift).map(|(a, o)| a - o).collect();
        let rotated = linalg::transform(&self.rotation, &z).expect("dimensions checked at construction");
        self.base.value(&rotated) + self.bias
    }
}

/// Maximum allowed deviation of `M·Mᵀ` from the identity.
pub const ROTATION_TOLERANCE: f64 = 1e-9;

/// Reads a shift vector and rotation matrix from a whitespace-separated text
/// file: `dim` numbers for the shift, then `dim * dim` numbers for the
/// rotation in row-major order. Line breaks are insignificant.
pub fn load_shift_rotate(path: impl AsRef<Path>, dim: usize) -> Result<(Vec<f64>, Matrix)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_shift_rotate(&text, dim, path)
}

pub(crate) fn parse_shift_rotate(text: &str, dim: usize, path: &Path) -> Result<(Vec<f64>, Matrix)> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let expected = dim + dim * dim;
    let mut values = Vec::with_capacity(expected);
    let mut last_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        for token in line.split_whitespace() {
            let v: f64 = token.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                message: format!("`{token}` is not a number"),
            })?;
            if values.len() == expected {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno,
                    message: format!("more than {expected} numbers for dimension {dim}"),
                });
            }
            values.push(v);
            last_line = lineno;
        }
    }
    if values.len() != expected {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: last_line.max(1),
            message: format!(
                "expected {expected} numbers for dimension {dim}, found {}",
                values.len()
            ),
        });
    }
    let rotation = Matrix::from_row_major(dim, dim, values.split_off(dim))?;
    let defect = rotation.orthonormality_defect();
    if defect.is_nan() || defect > ROTATION_TOLERANCE {
        return Err(Error::Validation(format!(
            "rotation in {} is not orthonormal (max |M·Mᵀ − I| = {defect:.3e})",
            path.display()
        )));
    }
    Ok((values, rotation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::io::Write;

    fn eval(kind: BuiltinKind, x: &[f64]) -> f64 {
        Builtin::new(kind, x.len()).unwrap().evaluate(x).unwrap()
    }

    #[test]
    fn optima_are_zero() {
        assert_eq!(eval(BuiltinKind::Sphere, &[0.0; 5]), 0.0);
        assert_eq!(eval(BuiltinKind::Rosenbrock, &[1.0; 5]), 0.0);
        assert_eq!(eval(BuiltinKind::Ackley, &[0.0; 5]), 0.0);
        assert_eq!(eval(BuiltinKind::Griewank, &[0.0; 5]), 0.0);
        assert_eq!(eval(BuiltinKind::Rastrigin, &[0.0; 5]), 0.0);
        assert_eq!(eval(BuiltinKind::Schwefel12, &[0.0; 5]), 0.0);
        assert_eq!(eval(BuiltinKind::Ellipsoid, &[0.0; 5]), 0.0);
    }

    #[test]
    fn rastrigin_hand_value() {
        assert!((eval(BuiltinKind::Rastrigin, &[0.5, 0.5]) - 40.5).abs() < 1e-12);
    }

    #[test]
    fn ellipsoid_conditioning() {
        assert_eq!(eval(BuiltinKind::Ellipsoid, &[1.0, 1.0]), 1.0 + 1e6);
    }

    #[test]
    fn suite_contents() {
        let suite = builtin_suite(30).unwrap();
        assert_eq!(suite.len(), 7);
        for f in &suite {
            assert_eq!(f.dim(), 30);
            assert_eq!(f.known_optimum(), Some(0.0));
            assert!(f.bounds().lower().iter().all(|&v| v == -100.0));
            assert!(f.bounds().upper().iter().all(|&v| v == 100.0));
        }
        assert!(builtin_suite(1).is_err());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let f = Builtin::new(BuiltinKind::Sphere, 3).unwrap();
        assert!(matches!(f.evaluate(&[1.0, 2.0]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn non_finite_value_names_the_problem() {
        let f = FnObjective::new("blowup", Bounds::uniform(2, -1.0, 1.0).unwrap(), |_| f64::NAN);
        match f.evaluate(&[0.0, 0.0]) {
            Err(Error::Evaluation { problem, .. }) => assert_eq!(problem, "blowup"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn builtins_never_below_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for f in builtin_suite(6).unwrap() {
            let best = f.value(&f.kind().optimum_point(6));
            for _ in 0..1000 {
                let x: Vec<f64> = (0..6).map(|_| rng.random_range(-100.0..=100.0)).collect();
                assert!(f.value(&x) >= best, "{} below optimum at {x:?}", f.name());
            }
        }
    }

    #[test]
    fn identity_transform_matches_base_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for kind in BuiltinKind::ALL {
            let base = Builtin::new(kind, 4).unwrap();
            let wrapped = ShiftRotateProblem::new(
                Box::new(base.clone()),
                vec![0.0; 4],
                Matrix::identity(4),
                0.0,
            )
            .unwrap();
            for _ in 0..1000 {
                let x: Vec<f64> = (0..4).map(|_| rng.random_range(-100.0..=100.0)).collect();
                assert_eq!(wrapped.value(&x), base.value(&x));
            }
        }
    }

    #[test]
    fn evaluation_is_pure() {
        let f = Builtin::new(BuiltinKind::Griewank, 5).unwrap();
        let x = [1.25, -7.5, 33.0, 0.1, -99.0];
        assert_eq!(f.value(&x).to_bits(), f.value(&x).to_bits());
    }

    #[test]
    fn shift_rotate_moves_optimum() {
        let base = Builtin::new(BuiltinKind::Sphere, 2).unwrap();
        let r = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let p = ShiftRotateProblem::new(Box::new(base), vec![3.0, -4.0], r, 100.0).unwrap();
        assert_eq!(p.evaluate(&[3.0, -4.0]).unwrap(), 100.0);
        assert_eq!(p.known_optimum(), Some(100.0));
        assert_eq!(p.evaluate(&[4.0, -4.0]).unwrap(), 101.0);
    }

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_identity_file() {
        let f = write_tmp("0 0 0\n1 0 0\n0 1 0\n0 0 1\n");
        let (shift, rot) = load_shift_rotate(f.path(), 3).unwrap();
        assert_eq!(shift, vec![0.0; 3]);
        assert_eq!(rot, Matrix::identity(3));
    }

    #[test]
    fn load_count_mismatch() {
        // D·(D+1) − 1 numbers
        let f = write_tmp("0 0\n1 0\n0\n");
        assert!(matches!(
            load_shift_rotate(f.path(), 2),
            Err(Error::Parse { line: 3, .. })
        ));
        let f = write_tmp("0 0\n1 0\n0 1\n7\n");
        assert!(matches!(
            load_shift_rotate(f.path(), 2),
            Err(Error::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn load_bad_token_reports_line() {
        let f = write_tmp("0 0\n1 x\n0 1\n");
        match load_shift_rotate(f.path(), 2) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains('x'));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn load_rejects_scaled_rotation() {
        let f = write_tmp("0 0\n2 0\n0 2\n");
        assert!(matches!(load_shift_rotate(f.path(), 2), Err(Error::Validation(_))));
    }

    #[test]
    fn load_missing_file() {
        assert!(matches!(
            load_shift_rotate("/nonexistent/definitely/missing.txt", 2),
            Err(Error::Io { .. })
        ));
    }
}
