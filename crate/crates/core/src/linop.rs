//! Linear operators with explicit adjoints.
//!
//! Every operator in this module is immutable after construction, so a single
//! instance can be shared (behind an `Arc`) by several concurrent solves.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::vecops::{dot, norm};

/// Seed of the start vector used by [`estimate_norm`].
pub const POWER_ITERATION_SEED: u64 = 0x5_eed0_fa11;

/// A bounded linear map `R^in_dim -> R^out_dim` together with its adjoint.
pub trait LinearMap: Send + Sync {
    fn in_dim(&self) -> usize;
    fn out_dim(&self) -> usize;

    /// `y = A x`. Panics on dimension mismatch.
    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    /// `x = A^* y`. Panics on dimension mismatch.
    fn adjoint_into(&self, y: &[f64], x: &mut [f64]);

    /// Upper bound on the operator norm, when known analytically.
    fn norm_bound(&self) -> Option<f64> {
        None
    }

    /// Explicit matrix, for operators small enough to be materialized.
    fn to_dense(&self) -> Option<DMatrix<f64>> {
        None
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim("LinearMap::apply", self.in_dim(), x.len())?;
        let mut y = vec![0.0; self.out_dim()];
        self.apply_into(x, &mut y);
        Ok(y)
    }

    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim("LinearMap::adjoint", self.out_dim(), y.len())?;
        let mut x = vec![0.0; self.in_dim()];
        self.adjoint_into(y, &mut x);
        Ok(x)
    }
}

/// Allocating forward application for already-validated dimensions.
pub(crate) fn fwd(op: &dyn LinearMap, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; op.out_dim()];
    op.apply_into(x, &mut y);
    y
}

/// Allocating adjoint application for already-validated dimensions.
pub(crate) fn adj(op: &dyn LinearMap, y: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; op.in_dim()];
    op.adjoint_into(y, &mut x);
    x
}

/// Image geometry. Pixel `(i, j)` (zero-based) lives at flat index `i * cols + j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageShape {
    pub rows: usize,
    pub cols: usize,
}

impl ImageShape {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Argument(format!(
                "image shape must be positive, got {rows}x{cols}"
            )));
        }
        Ok(Self { rows, cols })
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.cols + j
    }
}

// ---------------------------------------------------------------------------
// Dense matrices and simple wrappers
// ---------------------------------------------------------------------------

/// Largest matrix dimension for which the exact spectral norm is computed at
/// construction.
const DENSE_EXACT_NORM_LIMIT: usize = 512;

#[derive(Debug, Clone)]
pub struct DenseMap {
    matrix: DMatrix<f64>,
    norm: Option<f64>,
}

impl DenseMap {
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::Argument("dense operator must be non-empty".into()));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("dense operator has non-finite entries".into()));
        }
        let norm = if matrix.nrows().max(matrix.ncols()) <= DENSE_EXACT_NORM_LIMIT {
            let sv = matrix.clone().singular_values();
            Some(sv.iter().cloned().fold(0.0, f64::max))
        } else {
            None
        };
        Ok(Self { matrix, norm })
    }

    /// Overrides the stored norm, e.g. with the largest eigenvalue of a
    /// symmetric positive definite matrix computed elsewhere.
    pub fn with_norm(mut self, norm: f64) -> Self {
        self.norm = Some(norm);
        self
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// Builds a dense operator from row-major rows.
pub fn make_dense(rows: &[Vec<f64>]) -> Result<DenseMap> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(Error::Argument("dense operator needs at least one row".into()));
    }
    let ncols = rows[0].len();
    for row in rows {
        check_dim("make_dense row length", ncols, row.len())?;
    }
    let matrix = DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
    DenseMap::from_matrix(matrix)
}

impl LinearMap for DenseMap {
    fn in_dim(&self) -> usize {
        self.matrix.ncols()
    }

    fn out_dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.in_dim());
        assert_eq!(y.len(), self.out_dim());
        y.fill(0.0);
        // column-major storage: accumulate column by column
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let col = self.matrix.column(j);
            for (yi, aij) in y.iter_mut().zip(col.iter()) {
                *yi += aij * xj;
            }
        }
    }

    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        assert_eq!(y.len(), self.out_dim());
        assert_eq!(x.len(), self.in_dim());
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = dot(self.matrix.column(j).as_slice(), y);
        }
    }

    fn norm_bound(&self) -> Option<f64> {
        self.norm
    }

    fn to_dense(&self) -> Option<DMatrix<f64>> {
        Some(self.matrix.clone())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityMap {
    dim: usize,
}

impl IdentityMap {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl LinearMap for IdentityMap {
    fn in_dim(&self) -> usize {
        self.dim
    }
    fn out_dim(&self) -> usize {
        self.dim
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        x.copy_from_slice(y);
    }
    fn norm_bound(&self) -> Option<f64> {
        Some(1.0)
    }
    fn to_dense(&self) -> Option<DMatrix<f64>> {
        (self.dim <= 4096).then(|| DMatrix::identity(self.dim, self.dim))
    }
}

/// `factor * inner`.
#[derive(Clone)]
pub struct ScaledMap {
    inner: Arc<dyn LinearMap>,
    factor: f64,
}

impl ScaledMap {
    pub fn new(inner: Arc<dyn LinearMap>, factor: f64) -> Self {
        Self { inner, factor }
    }
}

impl LinearMap for ScaledMap {
    fn in_dim(&self) -> usize {
        self.inner.in_dim()
    }
    fn out_dim(&self) -> usize {
        self.inner.out_dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.inner.apply_into(x, y);
        y.iter_mut().for_each(|v| *v *= self.factor);
    }
    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        self.inner.adjoint_into(y, x);
        x.iter_mut().for_each(|v| *v *= self.factor);
    }
    fn norm_bound(&self) -> Option<f64> {
        self.inner.norm_bound().map(|n| n * self.factor.abs())
    }
    fn to_dense(&self) -> Option<DMatrix<f64>> {
        self.inner.to_dense().map(|m| m * self.factor)
    }
}

/// The adjoint `inner^*` viewed as an operator in its own right.
#[derive(Clone)]
pub struct AdjointMap {
    inner: Arc<dyn LinearMap>,
}

impl AdjointMap {
    pub fn new(inner: Arc<dyn LinearMap>) -> Self {
        Self { inner }
    }
}

impl LinearMap for AdjointMap {
    fn in_dim(&self) -> usize {
        self.inner.out_dim()
    }
    fn out_dim(&self) -> usize {
        self.inner.in_dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.inner.adjoint_into(x, y);
    }
    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        self.inner.apply_into(y, x);
    }
    fn norm_bound(&self) -> Option<f64> {
        self.inner.norm_bound()
    }
    fn to_dense(&self) -> Option<DMatrix<f64>> {
        self.inner.to_dense().map(|m| m.transpose())
    }
}

// ---------------------------------------------------------------------------
// Image operators
// ---------------------------------------------------------------------------

/// Forward-difference gradient `x -> (L1 x, L2 x)` with the last row (resp.
/// column) of each component set to zero. The output stacks the vertical
/// differences first, then the horizontal ones.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteGradient {
    shape: ImageShape,
}

pub fn make_discrete_gradient(shape: ImageShape) -> DiscreteGradient {
    DiscreteGradient { shape }
}

impl DiscreteGradient {
    pub fn shape(&self) -> ImageShape {
        self.shape
    }
}

impl LinearMap for DiscreteGradient {
    fn in_dim(&self) -> usize {
        self.shape.len()
    }

    fn out_dim(&self) -> usize {
        2 * self.shape.len()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.shape.len();
        assert_eq!(x.len(), n);
        assert_eq!(out.len(), 2 * n);
        let (m, c) = (self.shape.rows, self.shape.cols);
        let (d1, d2) = out.split_at_mut(n);
        for i in 0..m {
            for j in 0..c {
                let k = i * c + j;
                d1[k] = if i + 1 < m { x[k + c] - x[k] } else { 0.0 };
                d2[k] = if j + 1 < c { x[k + 1] - x[k] } else { 0.0 };
            }
        }
    }

    // negative divergence
    fn adjoint_into(&self, yz: &[f64], out: &mut [f64]) {
        let n = self.shape.len();
        assert_eq!(yz.len(), 2 * n);
        assert_eq!(out.len(), n);
        let (m, c) = (self.shape.rows, self.shape.cols);
        let (y, z) = yz.split_at(n);
        for i in 0..m {
            for j in 0..c {
                let k = i * c + j;
                let mut v = 0.0;
                if i + 1 < m {
                    v -= y[k];
                }
                if i > 0 {
                    v += y[k - c];
                }
                if j + 1 < c {
                    v -= z[k];
                }
                if j > 0 {
                    v += z[k - 1];
                }
                out[k] = v;
            }
        }
    }

    fn norm_bound(&self) -> Option<f64> {
        Some(8f64.sqrt())
    }
}

/// Periodic convolution with a normalized, truncated Gaussian kernel.
///
/// The 2-D kernel is the outer product of a normalized 1-D kernel, so the
/// convolution is applied as two separable passes.
#[derive(Debug, Clone)]
pub struct GaussianBlur {
    shape: ImageShape,
    kernel: Vec<f64>,
}

pub fn make_gaussian_blur(shape: ImageShape, kernel_size: usize, std: f64) -> Result<GaussianBlur> {
    if kernel_size.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "blur kernel size must be odd, got {kernel_size}"
        )));
    }
    if !(std > 0.0 && std.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "blur standard deviation must be positive, got {std}"
        )));
    }
    if kernel_size > shape.rows || kernel_size > shape.cols {
        return Err(Error::InvalidConfig(format!(
            "blur kernel {kernel_size}x{kernel_size} larger than image {}x{}",
            shape.rows, shape.cols
        )));
    }
    let half = (kernel_size / 2) as i64;
    let mut kernel: Vec<f64> = (-half..=half)
        .map(|o| (-((o * o) as f64) / (2.0 * std * std)).exp())
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|v| *v /= total);
    Ok(GaussianBlur { shape, kernel })
}

impl GaussianBlur {
    pub fn shape(&self) -> ImageShape {
        self.shape
    }

    /// The full 2-D kernel, row-major, centered.
    pub fn kernel_2d(&self) -> Vec<f64> {
        let k = &self.kernel;
        k.iter().flat_map(|a| k.iter().map(move |b| a * b)).collect()
    }

    fn pass(&self, x: &[f64], out: &mut [f64], flip: bool) {
        let (m, c) = (self.shape.rows as i64, self.shape.cols as i64);
        let half = (self.kernel.len() / 2) as i64;
        let sign = if flip { -1 } else { 1 };
        let mut tmp = vec![0.0; x.len()];
        // horizontal
        for i in 0..m {
            let row = &x[(i * c) as usize..((i + 1) * c) as usize];
            for j in 0..c {
                let mut acc = 0.0;
                for (t, w) in self.kernel.iter().enumerate() {
                    let off = t as i64 - half;
                    let jj = (j - sign * off).rem_euclid(c);
                    acc += w * row[jj as usize];
                }
                tmp[(i * c + j) as usize] = acc;
            }
        }
        // vertical
        for i in 0..m {
            for j in 0..c {
                let mut acc = 0.0;
                for (t, w) in self.kernel.iter().enumerate() {
                    let off = t as i64 - half;
                    let ii = (i - sign * off).rem_euclid(m);
                    acc += w * tmp[(ii * c + j) as usize];
                }
                out[(i * c + j) as usize] = acc;
            }
        }
    }
}

impl LinearMap for GaussianBlur {
    fn in_dim(&self) -> usize {
        self.shape.len()
    }
    fn out_dim(&self) -> usize {
        self.shape.len()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.shape.len());
        assert_eq!(y.len(), self.shape.len());
        self.pass(x, y, false);
    }
    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        assert_eq!(y.len(), self.shape.len());
        assert_eq!(x.len(), self.shape.len());
        self.pass(y, x, true);
    }
    fn norm_bound(&self) -> Option<f64> {
        Some(1.0)
    }
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

/// Power iteration on `A^* A`; returns `sqrt` of the dominant eigenvalue
/// estimate. The start vector is drawn from a fixed seed, so the result is
/// deterministic.
pub fn estimate_norm(op: &dyn LinearMap, max_iters: usize, tol: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_ITERATION_SEED);
    let mut v: Vec<f64> = (0..op.in_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = norm(&v);
    if nv == 0.0 {
        return 0.0;
    }
    v.iter_mut().for_each(|e| *e /= nv);
    let mut av = vec![0.0; op.out_dim()];
    let mut w = vec![0.0; op.in_dim()];
    let mut lambda = 0.0;
    for _ in 0..max_iters.max(1) {
        op.apply_into(&v, &mut av);
        let rayleigh = dot(&av, &av);
        op.adjoint_into(&av, &mut w);
        let nw = norm(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let done = (rayleigh - lambda).abs() <= tol * rayleigh;
        lambda = rayleigh;
        if done {
            break;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / nw;
        }
    }
    lambda.sqrt()
}

/// `norm_bound` when available, otherwise a slightly inflated power-iteration
/// estimate.
pub fn norm_upper(op: &dyn LinearMap) -> f64 {
    op.norm_bound()
        .unwrap_or_else(|| estimate_norm(op, 500, 1e-10) * (1.0 + 1e-6))
}

/// `|<Ax, y> - <x, A^* y>| / (1 + |x| |y|)`.
pub fn adjoint_mismatch(op: &dyn LinearMap, x: &[f64], y: &[f64]) -> Result<f64> {
    let ax = op.apply(x)?;
    let aty = op.adjoint(y)?;
    Ok((dot(&ax, y) - dot(x, &aty)).abs() / (1.0 + norm(x) * norm(y)))
}

/// Worst [`adjoint_mismatch`] over `pairs` random Gaussian pairs.
pub fn worst_adjoint_mismatch(op: &dyn LinearMap, pairs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x: Vec<f64> = (0..op.in_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..op.out_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = adjoint_mismatch(op, &x, &y).expect("dimensions drawn from the operator");
        worst = worst.max(m);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dense_identity_and_permutation() {
        let id = make_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(id.apply(&[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
        let perm = make_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(perm.apply(&[3.0, 4.0]).unwrap(), vec![4.0, 3.0]);
        assert_eq!(perm.adjoint(&[3.0, 4.0]).unwrap(), vec![4.0, 3.0]);
    }

    #[test]
    fn dense_adjoint_is_transpose() {
        let a = make_dense(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(a.adjoint(&[1.0, 0.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn dense_dimension_errors() {
        let a = make_dense(&[vec![1.0, 2.0, 3.0]]).unwrap();
        assert!(matches!(a.apply(&[1.0]), Err(Error::Dimension { .. })));
        assert!(matches!(a.adjoint(&[1.0, 2.0]), Err(Error::Dimension { .. })));
        assert!(make_dense(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(make_dense(&[vec![f64::NAN]]).is_err());
    }

    #[test]
    fn gradient_of_small_image() {
        let shape = ImageShape::new(2, 2).unwrap();
        let l = make_discrete_gradient(shape);
        let out = l.apply(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(&out[..4], &[2.0, 2.0, 0.0, 0.0]);
        assert_eq!(&out[4..], &[1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn gradient_kills_constants() {
        let shape = ImageShape::new(5, 7).unwrap();
        let l = make_discrete_gradient(shape);
        let out = l.apply(&vec![0.3; 35]).unwrap();
        assert!(out.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn gradient_norm_below_sqrt_eight() {
        let l = make_discrete_gradient(ImageShape::new(16, 16).unwrap());
        let est = estimate_norm(&l, 5000, 1e-12);
        assert!(est * est <= 8.0 + 1e-6, "{est}");
    }

    #[test]
    fn gradient_norm_8x8_range() {
        let l = make_discrete_gradient(ImageShape::new(8, 8).unwrap());
        let est = estimate_norm(&l, 5000, 1e-13);
        assert!(est > 2.6 && est <= 8f64.sqrt(), "{est}");
    }

    #[test]
    fn blur_preserves_constants() {
        let shape = ImageShape::new(16, 12).unwrap();
        let a = make_gaussian_blur(shape, 9, 4.0).unwrap();
        let y = a.apply(&vec![0.7; 192]).unwrap();
        for v in y {
            assert_abs_diff_eq!(v, 0.7, epsilon = 1e-14);
        }
    }

    #[test]
    fn blur_kernel_sums_to_one() {
        let a = make_gaussian_blur(ImageShape::new(9, 9).unwrap(), 9, 4.0).unwrap();
        let s: f64 = a.kernel_2d().iter().sum();
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn blur_matches_direct_2d_convolution() {
        let shape = ImageShape::new(10, 11).unwrap();
        let a = make_gaussian_blur(shape, 5, 1.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..shape.len()).map(|_| rng.random::<f64>()).collect();
        let y = a.apply(&x).unwrap();
        let k = a.kernel_2d();
        for i in 0..10i64 {
            for j in 0..11i64 {
                let mut acc = 0.0;
                for a_ in -2..=2i64 {
                    for b_ in -2..=2i64 {
                        let w = k[((a_ + 2) * 5 + (b_ + 2)) as usize];
                        let ii = (i - a_).rem_euclid(10);
                        let jj = (j - b_).rem_euclid(11);
                        acc += w * x[(ii * 11 + jj) as usize];
                    }
                }
                assert_abs_diff_eq!(acc, y[(i * 11 + j) as usize], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn blur_config_errors() {
        let shape = ImageShape::new(8, 8).unwrap();
        assert!(matches!(
            make_gaussian_blur(shape, 9, 4.0),
            Err(Error::InvalidConfig(_))
        ));
        assert!(make_gaussian_blur(shape, 4, 1.0).is_err());
        assert!(make_gaussian_blur(shape, 3, 0.0).is_err());
    }

    #[test]
    fn blur_norm_is_one() {
        let a = make_gaussian_blur(ImageShape::new(32, 32).unwrap(), 9, 4.0).unwrap();
        let est = estimate_norm(&a, 10_000, 1e-15);
        assert_abs_diff_eq!(est, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn norm_of_identity_and_diagonal() {
        assert_abs_diff_eq!(estimate_norm(&IdentityMap::new(5), 100, 1e-14), 1.0, epsilon = 1e-10);
        let d = make_dense(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 3.0]]).unwrap();
        assert_abs_diff_eq!(estimate_norm(&d, 1000, 1e-15), 3.0, epsilon = 1e-8);
        assert_abs_diff_eq!(d.norm_bound().unwrap(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn norm_of_zero_operator() {
        let z = make_dense(&[vec![0.0, 0.0]]).unwrap();
        assert_eq!(estimate_norm(&z, 10, 1e-10), 0.0);
    }

    #[test]
    fn wrappers_are_consistent() {
        let a: Arc<dyn LinearMap> = Arc::new(make_dense(&[vec![1.0, 2.0, 0.5], vec![3.0, -4.0, 1.0]]).unwrap());
        let t = AdjointMap::new(a.clone());
        let s = ScaledMap::new(a.clone(), -2.0);
        assert!(worst_adjoint_mismatch(&t, 20, 1) < 1e-14);
        assert!(worst_adjoint_mismatch(&s, 20, 2) < 1e-14);
        assert_eq!(t.apply(&[1.0, 0.0]).unwrap(), vec![1.0, 2.0, 0.5]);
        assert_eq!(s.apply(&[1.0, 0.0, 0.0]).unwrap(), vec![-2.0, -6.0]);
    }
}
