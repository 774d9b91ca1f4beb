//! Proximal operators, projections and the conjugate pairs used by the
//! solvers.
//!
//! `prox(gamma, x)` always means `argmin_y gamma * f(y) + 0.5 * |y - x|^2`.
//! Indicator functions report `f64::INFINITY` outside their set.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{check_dim, Error, Result};
use crate::vecops::dot;

/// A closed convex function exposed through its value and proximal map.
pub trait ProxFn: Send + Sync {
    fn dim(&self) -> usize;

    /// Function value; `f64::INFINITY` outside the domain.
    fn value(&self, x: &[f64]) -> f64;

    /// Writes `prox_{gamma f}(x)` into `out`. Expects `gamma > 0` and matching
    /// dimensions.
    fn prox_into(&self, gamma: f64, x: &[f64], out: &mut [f64]);

    fn prox(&self, gamma: f64, x: &[f64]) -> Result<Vec<f64>> {
        if !(gamma > 0.0) {
            return Err(Error::Argument(format!("prox parameter must be positive, got {gamma}")));
        }
        check_dim("ProxFn::prox", self.dim(), x.len())?;
        let mut out = vec![0.0; x.len()];
        self.prox_into(gamma, x, &mut out);
        Ok(out)
    }

    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Lipschitz constant of the gradient.
    fn lipschitz(&self) -> Option<f64> {
        None
    }

    /// Modulus `g` such that `f - g/2 |.|^2` is convex.
    fn strong_convexity(&self) -> f64 {
        0.0
    }

    /// `argmin_x f(x) - <w, x>`, when available in closed form.
    fn argmin_linear(&self, _w: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

/// Projection of every coordinate onto `[lo, hi]`.
pub fn project_box(x: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>> {
    if lo > hi {
        return Err(Error::Argument(format!("empty box: lo {lo} > hi {hi}")));
    }
    Ok(x.iter().map(|v| v.clamp(lo, hi)).collect())
}

/// Projection of each pair `(v_i, w_i)` onto the centered disk of radius
/// `lambda`.
pub fn project_pairwise_l2_ball(v: &[f64], w: &[f64], lambda: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(lambda > 0.0) {
        return Err(Error::Argument(format!("ball radius must be positive, got {lambda}")));
    }
    check_dim("project_pairwise_l2_ball", v.len(), w.len())?;
    let mut pv = v.to_vec();
    let mut pw = w.to_vec();
    for (a, b) in pv.iter_mut().zip(pw.iter_mut()) {
        let scale = lambda / lambda.max(a.hypot(*b));
        *a *= scale;
        *b *= scale;
    }
    Ok((pv, pw))
}

fn check_labels(labels: &[f64]) -> Result<()> {
    match labels.iter().position(|y| *y != 1.0 && *y != -1.0) {
        Some(i) => Err(Error::Argument(format!(
            "label {i} is {}, expected +1 or -1",
            labels[i]
        ))),
        None => Ok(()),
    }
}

/// Interval `label * [-c, 0]`.
#[inline]
fn hinge_conj_interval(label: f64, c: f64) -> (f64, f64) {
    if label > 0.0 {
        (-c, 0.0)
    } else {
        (0.0, c)
    }
}

/// Prox of `mu * g^*` for the hinge conjugate
/// `g^*(p) = sum p_i y_i` on `{p : p_i y_i in [-c, 0]}`: coordinate `i` is
/// `p_i - mu y_i` projected onto `y_i [-c, 0]`.
pub fn prox_hinge_conjugate(p: &[f64], labels: &[f64], c: f64, mu: f64) -> Result<Vec<f64>> {
    check_dim("prox_hinge_conjugate", labels.len(), p.len())?;
    check_labels(labels)?;
    if !(c > 0.0) || !(mu > 0.0) {
        return Err(Error::Argument(format!(
            "hinge parameters must be positive, got C={c}, mu={mu}"
        )));
    }
    Ok(p.iter()
        .zip(labels)
        .map(|(pi, yi)| {
            let (lo, hi) = hinge_conj_interval(*yi, c);
            (pi - mu * yi).clamp(lo, hi)
        })
        .collect())
}

/// `prox_{gamma f}(x) = x - gamma * prox_{(1/gamma) f^*}(x / gamma)`.
pub fn prox_from_conjugate<F>(conj_prox: F, gamma: f64, x: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    if !(gamma > 0.0) {
        return Err(Error::Argument(format!("prox parameter must be positive, got {gamma}")));
    }
    let scaled: Vec<f64> = x.iter().map(|v| v / gamma).collect();
    let c = conj_prox(1.0 / gamma, &scaled);
    check_dim("prox_from_conjugate", x.len(), c.len())?;
    Ok(x.iter().zip(&c).map(|(xi, ci)| xi - gamma * ci).collect())
}

/// `|prox_{gamma f}(x) + gamma prox_{(1/gamma) f^*}(x/gamma) - x|`.
pub fn moreau_residual<F, G>(fn_prox: F, conj_prox: G, gamma: f64, x: &[f64]) -> f64
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
    G: Fn(f64, &[f64]) -> Vec<f64>,
{
    let p = fn_prox(gamma, x);
    let scaled: Vec<f64> = x.iter().map(|v| v / gamma).collect();
    let q = conj_prox(1.0 / gamma, &scaled);
    p.iter()
        .zip(&q)
        .zip(x)
        .map(|((pi, qi), xi)| {
            let r = pi + gamma * qi - xi;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

// ---------------------------------------------------------------------------
// Concrete functions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct ZeroFn {
    pub dim: usize,
}

impl ProxFn for ZeroFn {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn prox_into(&self, _gamma: f64, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0; x.len()])
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// `0.5 |x|^2 + <x, shift>`. With a zero shift this is self-conjugate.
#[derive(Debug, Clone)]
pub struct ShiftedHalfSquare {
    shift: Vec<f64>,
}

impl ShiftedHalfSquare {
    pub fn new(shift: Vec<f64>) -> Self {
        Self { shift }
    }

    pub fn centered(dim: usize) -> Self {
        Self { shift: vec![0.0; dim] }
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }
}

impl ProxFn for ShiftedHalfSquare {
    fn dim(&self) -> usize {
        self.shift.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * dot(x, x) + dot(x, &self.shift)
    }
    fn prox_into(&self, gamma: f64, x: &[f64], out: &mut [f64]) {
        for ((o, xi), si) in out.iter_mut().zip(x).zip(&self.shift) {
            *o = (xi - gamma * si) / (1.0 + gamma);
        }
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(x.iter().zip(&self.shift).map(|(a, b)| a + b).collect())
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
    fn strong_convexity(&self) -> f64 {
        1.0
    }
    fn argmin_linear(&self, w: &[f64]) -> Option<Vec<f64>> {
        Some(w.iter().zip(&self.shift).map(|(a, b)| a - b).collect())
    }
}

/// `0.5 x^T P x + q^T x` with `P` symmetric positive semidefinite.
#[derive(Debug, Clone)]
pub struct Quadratic {
    p: DMatrix<f64>,
    q: DVector<f64>,
    lambda_min: f64,
    lambda_max: f64,
    p_chol: Option<Cholesky<f64, Dyn>>,
    unit_prox_chol: Cholesky<f64, Dyn>,
}

impl Quadratic {
    pub fn new(p: DMatrix<f64>, q: Vec<f64>) -> Result<Self> {
        check_square_symmetric(&p)?;
        let eig = p.clone().symmetric_eigen();
        let lambda_min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let lambda_max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Self::with_spectrum(p, q, lambda_min, lambda_max)
    }

    /// Uses caller-supplied extreme eigenvalues instead of a dense
    /// eigendecomposition.
    pub fn with_spectrum(p: DMatrix<f64>, q: Vec<f64>, lambda_min: f64, lambda_max: f64) -> Result<Self> {
        check_square_symmetric(&p)?;
        check_dim("Quadratic linear term", p.nrows(), q.len())?;
        if lambda_min < -1e-10 * lambda_max.abs().max(1.0) {
            return Err(Error::Argument(format!(
                "quadratic form is not positive semidefinite (lambda_min = {lambda_min})"
            )));
        }
        let n = p.nrows();
        let p_chol = if lambda_min > 0.0 {
            Cholesky::new(p.clone())
        } else {
            None
        };
        let unit_prox_chol = Cholesky::new(DMatrix::identity(n, n) + &p)
            .ok_or_else(|| Error::Argument("I + P is not positive definite".into()))?;
        Ok(Self {
            p,
            q: DVector::from_vec(q),
            lambda_min: lambda_min.max(0.0),
            lambda_max,
            p_chol,
            unit_prox_chol,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn linear(&self) -> &[f64] {
        self.q.as_slice()
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }
}

fn check_square_symmetric(p: &DMatrix<f64>) -> Result<()> {
    if p.nrows() != p.ncols() || p.nrows() == 0 {
        return Err(Error::Argument(format!(
            "quadratic form must be square and non-empty, got {}x{}",
            p.nrows(),
            p.ncols()
        )));
    }
    let scale = p.amax().max(1.0);
    for i in 0..p.nrows() {
        for j in 0..i {
            if (p[(i, j)] - p[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::Argument(format!("quadratic form not symmetric at ({i},{j})")));
            }
        }
    }
    Ok(())
}

impl ProxFn for Quadratic {
    fn dim(&self) -> usize {
        self.q.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let xv = DVector::from_column_slice(x);
        0.5 * xv.dot(&(&self.p * &xv)) + xv.dot(&self.q)
    }
    fn prox_into(&self, gamma: f64, x: &[f64], out: &mut [f64]) {
        let rhs = DVector::from_column_slice(x) - &self.q * gamma;
        let sol = if gamma == 1.0 {
            self.unit_prox_chol.solve(&rhs)
        } else {
            let n = self.dim();
            let m = DMatrix::identity(n, n) + &self.p * gamma;
            Cholesky::new(m).expect("I + gamma P is positive definite").solve(&rhs)
        };
        out.copy_from_slice(sol.as_slice());
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let g = &self.p * DVector::from_column_slice(x) + &self.q;
        Some(g.as_slice().to_vec())
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(self.lambda_max.max(0.0))
    }
    fn strong_convexity(&self) -> f64 {
        self.lambda_min
    }
    fn argmin_linear(&self, w: &[f64]) -> Option<Vec<f64>> {
        let chol = self.p_chol.as_ref()?;
        let sol = chol.solve(&(DVector::from_column_slice(w) - &self.q));
        Some(sol.as_slice().to_vec())
    }
}

/// `weight * |x|_1`.
#[derive(Debug, Clone, Copy)]
pub struct L1Norm {
    pub dim: usize,
    pub weight: f64,
}

impl ProxFn for L1Norm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.weight * x.iter().map(|v| v.abs()).sum::<f64>()
    }
    fn prox_into(&self, gamma: f64, x: &[f64], out: &mut [f64]) {
        let t = gamma * self.weight;
        for (o, v) in out.iter_mut().zip(x) {
            *o = v.signum() * (v.abs() - t).max(0.0);
        }
    }
}

/// Indicator of `[lo, hi]^dim`.
#[derive(Debug, Clone, Copy)]
pub struct BoxIndicator {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
}

impl BoxIndicator {
    pub fn symmetric(dim: usize, radius: f64) -> Self {
        Self {
            dim,
            lo: -radius,
            hi: radius,
        }
    }
}

impl ProxFn for BoxIndicator {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        if x.iter().all(|v| *v >= self.lo && *v <= self.hi) {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn prox_into(&self, _gamma: f64, x: &[f64], out: &mut [f64]) {
        for (o, v) in out.iter_mut().zip(x) {
            *o = v.clamp(self.lo, self.hi);
        }
    }
}

/// `weight * sum_i |(x_i, x_{i+pairs})|_2` on vectors of length `2 * pairs`.
#[derive(Debug, Clone, Copy)]
pub struct GroupL2Norm {
    pub pairs: usize,
    pub weight: f64,
}

impl ProxFn for GroupL2Norm {
    fn dim(&self) -> usize {
        2 * self.pairs
    }
    fn value(&self, x: &[f64]) -> f64 {
        let (v, w) = x.split_at(self.pairs);
        self.weight * v.iter().zip(w).map(|(a, b)| a.hypot(*b)).sum::<f64>()
    }
    fn prox_into(&self, gamma: f64, x: &[f64], out: &mut [f64]) {
        let t = gamma * self.weight;
        let n = self.pairs;
        for i in 0..n {
            let (a, b) = (x[i], x[i + n]);
            let r = a.hypot(b);
            let s = if r > t { 1.0 - t / r } else { 0.0 };
            out[i] = s * a;
            out[i + n] = s * b;
        }
    }
}

/// Indicator of `{(v, w) : |(v_i, w_i)|_2 <= radius for all i}`.
#[derive(Debug, Clone, Copy)]
pub struct PairwiseBallIndicator {
    pub pairs: usize,
    pub radius: f64,
}

impl ProxFn for PairwiseBallIndicator {
    fn dim(&self) -> usize {
        2 * self.pairs
    }
    fn value(&self, x: &[f64]) -> f64 {
        let (v, w) = x.split_at(self.pairs);
        // projections land on the sphere up to rounding
        let limit = self.radius * (1.0 + 1e-12);
        if v.iter().zip(w).all(|(a, b)| a.hypot(*b) <= limit) {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn prox_into(&self, _gamma: f64, x: &[f64], out: &mut [f64]) {
        let n = self.pairs;
        for i in 0..n {
            let (a, b) = (x[i], x[i + n]);
            let scale = self.radius / self.radius.max(a.hypot(b));
            out[i] = a * scale;
            out[i + n] = b * scale;
        }
    }
}

/// `c * sum_i max(1 - z_i y_i, 0)`; its prox is computed from the conjugate
/// through Moreau's decomposition.
#[derive(Debug, Clone)]
pub struct Hinge {
    c: f64,
    labels: Vec<f64>,
}

impl Hinge {
    pub fn new(labels: Vec<f64>, c: f64) -> Result<Self> {
        check_labels(&labels)?;
        if !(c > 0.0) {
            return Err(Error::Argument(format!("hinge weight must be positive, got {c}")));
        }
        Ok(Self { c, labels })
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn weight(&self) -> f64 {
        self.c
    }
}

impl ProxFn for Hinge {
    fn dim(&self) -> usize {
        self.labels.len()
    }
    fn value(&self, z: &[f64]) -> f64 {
        self.c
            * z.iter()
                .zip(&self.labels)
                .map(|(zi, yi)| (1.0 - zi * yi).max(0.0))
                .sum::<f64>()
    }
    fn prox_into(&self, gamma: f64, x: &[f64], out: &mut [f64]) {
        // x - gamma * prox_{(1/gamma) g*}(x / gamma)
        let mu = 1.0 / gamma;
        for ((o, xi), yi) in out.iter_mut().zip(x).zip(&self.labels) {
            let (lo, hi) = hinge_conj_interval(*yi, self.c);
            let q = (xi / gamma - mu * yi).clamp(lo, hi);
            *o = xi - gamma * q;
        }
    }
}

/// Conjugate of [`Hinge`]: `sum p_i y_i` on `{p_i y_i in [-c, 0]}`.
#[derive(Debug, Clone)]
pub struct HingeConjugate {
    c: f64,
    labels: Vec<f64>,
}

impl HingeConjugate {
    pub fn new(labels: Vec<f64>, c: f64) -> Result<Self> {
        check_labels(&labels)?;
        if !(c > 0.0) {
            return Err(Error::Argument(format!("hinge weight must be positive, got {c}")));
        }
        Ok(Self { c, labels })
    }
}

impl ProxFn for HingeConjugate {
    fn dim(&self) -> usize {
        self.labels.len()
    }
    fn value(&self, p: &[f64]) -> f64 {
        let mut total = 0.0;
        for (pi, yi) in p.iter().zip(&self.labels) {
            let t = pi * yi;
            if !(-self.c..=0.0).contains(&t) {
                return f64::INFINITY;
            }
            total += t;
        }
        total
    }
    fn prox_into(&self, gamma: f64, p: &[f64], out: &mut [f64]) {
        for ((o, pi), yi) in out.iter_mut().zip(p).zip(&self.labels) {
            let (lo, hi) = hinge_conj_interval(*yi, self.c);
            *o = (pi - gamma * yi).clamp(lo, hi);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn box_projection_examples() {
        let lam = 1.5;
        assert_eq!(
            project_box(&[2.0 * lam, -0.5 * lam], -lam, lam).unwrap(),
            vec![lam, -0.5 * lam]
        );
        assert_eq!(project_box(&[0.1, -0.2], -1.0, 1.0).unwrap(), vec![0.1, -0.2]);
        let lam = 5e-5;
        assert_eq!(project_box(&[1e-4, -1e-4], -lam, lam).unwrap(), vec![5e-5, -5e-5]);
        assert!(project_box(&[0.0], 1.0, -1.0).is_err());
    }

    #[test]
    fn pairwise_ball_examples() {
        let lam = 2.0;
        let (v, w) = project_pairwise_l2_ball(&[0.3 * lam], &[0.4 * lam], lam).unwrap();
        assert_eq!((v[0], w[0]), (0.3 * lam, 0.4 * lam));
        let (v, w) = project_pairwise_l2_ball(&[3.0], &[4.0], 1.0).unwrap();
        assert_abs_diff_eq!(v[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(w[0], 0.8, epsilon = 1e-15);
        let (v, w) = project_pairwise_l2_ball(&[0.0], &[0.0], 1.0).unwrap();
        assert_eq!((v[0], w[0]), (0.0, 0.0));
        assert!(project_pairwise_l2_ball(&[1.0], &[1.0], 0.0).is_err());
        assert!(project_pairwise_l2_ball(&[1.0], &[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn hinge_conjugate_prox_examples() {
        assert_eq!(prox_hinge_conjugate(&[0.5], &[1.0], 1.0, 1.0).unwrap(), vec![-0.5]);
        assert_eq!(prox_hinge_conjugate(&[-3.0], &[-1.0], 1.0, 1.0).unwrap(), vec![0.0]);
        let p = prox_hinge_conjugate(&[-0.25], &[1.0], 1.0, 1e-300).unwrap();
        assert_eq!(p, vec![-0.25]);
        assert!(prox_hinge_conjugate(&[0.0], &[0.5], 1.0, 1.0).is_err());
        assert!(prox_hinge_conjugate(&[0.0], &[1.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn moreau_for_half_square() {
        let f = ShiftedHalfSquare::centered(2);
        let prox = |g: f64, x: &[f64]| f.prox(g, x).unwrap();
        let out = prox_from_conjugate(prox, 1.0, &[2.0, 2.0]).unwrap();
        assert_eq!(out, vec![1.0, 1.0]);
        assert!(moreau_residual(prox, prox, 0.7, &[1.0, -3.0]) < 1e-12);
        assert!(prox_from_conjugate(prox, 0.0, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn hinge_prox_matches_piecewise_formula() {
        let h = Hinge::new(vec![1.0, 1.0, 1.0, -1.0], 2.0).unwrap();
        let gamma = 0.5; // gamma * C = 1
        let out = h.prox(gamma, &[1.5, -0.5, 0.5, 0.2]).unwrap();
        // y=+1: x >= 1 -> x; x <= 0 -> x + 1; else 1
        assert_abs_diff_eq!(out[0], 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out[2], 1.0, epsilon = 1e-15);
        // y=-1 mirrors: x <= -1 -> x; x >= 0 -> x - 1; else -1
        assert_abs_diff_eq!(out[3], -0.8, epsilon = 1e-15);
    }

    #[test]
    fn quadratic_prox_and_argmin() {
        let p = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let f = Quadratic::new(p.clone(), vec![1.0, -1.0]).unwrap();
        let x = f.argmin_linear(&[0.3, 0.2]).unwrap();
        let g = f.gradient(&x).unwrap();
        assert_abs_diff_eq!(g[0], 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(g[1], 0.2, epsilon = 1e-12);
        for gamma in [1.0, 0.3] {
            let y = f.prox(gamma, &[1.0, 2.0]).unwrap();
            let gy = f.gradient(&y).unwrap();
            // gamma grad f(y) + y - x = 0
            assert_abs_diff_eq!(gamma * gy[0] + y[0] - 1.0, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(gamma * gy[1] + y[1] - 2.0, 0.0, epsilon = 1e-12);
        }
        assert!(f.strong_convexity() > 0.0);
        assert!(Quadratic::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]), vec![0.0; 2]).is_err());
    }

    #[test]
    fn group_norm_and_ball_are_conjugate() {
        let g = GroupL2Norm { pairs: 3, weight: 0.7 };
        let s = PairwiseBallIndicator { pairs: 3, radius: 0.7 };
        let x = [1.0, -0.2, 0.1, 0.5, 0.3, -2.0];
        for gamma in [0.5, 1.0, 3.0] {
            let r = moreau_residual(|t, v| g.prox(t, v).unwrap(), |t, v| s.prox(t, v).unwrap(), gamma, &x);
            assert!(r < 1e-14, "{r}");
        }
    }

    #[test]
    fn labels_are_validated() {
        assert!(Hinge::new(vec![1.0, 0.0], 1.0).is_err());
        assert!(HingeConjugate::new(vec![1.0], -1.0).is_err());
    }
}
