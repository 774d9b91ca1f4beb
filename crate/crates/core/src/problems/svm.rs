//! Kernel SVM in the two-block form
//! `min 1/2 x^T K x + C sum_i max(1 - z_i y_i, 0)  s.t.  Kx - z = 0`.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::metrics::{misclassification_rate, rmse};
use crate::error::{check_dim, Error, Result};
use crate::linop::{DenseMap, IdentityMap, LinearMap, ScaledMap};
use crate::prox::{Hinge, Quadratic};
use crate::solver::{
    solve, Algorithm, IterateState, MetricHook, MetricRule, Monitor, Observation, RunRecord, Schedule, SolverConfig,
    Subproblem, TwoBlockProblem,
};

/// Above this many points `lambda_min(K)` comes from inverse power iteration.
pub const DENSE_EIGEN_LIMIT: usize = 2048;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

fn kernel(a: &[f64], b: &[f64], sigma: f64) -> f64 {
    (-sq_dist(a, b) / (2.0 * sigma * sigma)).exp()
}

fn check_features(data: &[Vec<f64>]) -> Result<usize> {
    let d = data
        .first()
        .map(|r| r.len())
        .ok_or_else(|| Error::Argument("empty data set".into()))?;
    for (i, row) in data.iter().enumerate() {
        if row.len() != d {
            return Err(Error::Argument(format!(
                "feature row {i} has {} entries, expected {d}",
                row.len()
            )));
        }
    }
    Ok(d)
}

/// Gaussian-kernel Gram matrix `K_ij = exp(-|X_i - X_j|^2 / (2 sigma^2))`.
pub fn gram_matrix(data: &[Vec<f64>], sigma: f64) -> Result<DMatrix<f64>> {
    if !(sigma > 0.0) {
        return Err(Error::Argument(format!("kernel width must be positive, got {sigma}")));
    }
    check_features(data)?;
    let n = data.len();
    let mut k = DMatrix::from_element(n, n, 1.0);
    for i in 0..n {
        for j in 0..i {
            let v = kernel(&data[i], &data[j], sigma);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Cross-kernel matrix `Q_ij = kappa(query_i, train_j)`.
pub fn cross_kernel(train: &[Vec<f64>], query: &[Vec<f64>], sigma: f64) -> Result<DMatrix<f64>> {
    if !(sigma > 0.0) {
        return Err(Error::Argument(format!("kernel width must be positive, got {sigma}")));
    }
    if query.is_empty() {
        return Ok(DMatrix::zeros(0, train.len()));
    }
    let d = check_features(train)?;
    check_dim("query features", d, check_features(query)?)?;
    Ok(DMatrix::from_fn(query.len(), train.len(), |i, j| {
        kernel(&query[i], &train[j], sigma)
    }))
}

/// `sum_i x_i kappa(q, X_i)` for every query point `q`.
pub fn decision_values(x: &[f64], train: &[Vec<f64>], query: &[Vec<f64>], sigma: f64) -> Result<Vec<f64>> {
    check_dim("coefficients", train.len(), x.len())?;
    let q = cross_kernel(train, query, sigma)?;
    Ok((q * DVector::from_column_slice(x)).as_slice().to_vec())
}

/// `(lambda_min, lambda_max)` of a symmetric positive semidefinite matrix.
pub fn extreme_eigenvalues(k: &DMatrix<f64>) -> Result<(f64, f64)> {
    let n = k.nrows();
    if n <= DENSE_EIGEN_LIMIT {
        let ev = k.clone().symmetric_eigen().eigenvalues;
        let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        return Ok((lo, hi));
    }
    let hi = power_iteration(n, |v| k * v, 1e-10, 10_000);
    let chol = k
        .clone()
        .cholesky()
        .ok_or_else(|| Error::IllConditioned("Gram matrix is not numerically positive definite".into()))?;
    let inv = power_iteration(n, |v| chol.solve(v), 1e-10, 10_000);
    Ok((1.0 / inv, hi))
}

fn power_iteration<F>(n: usize, mut op: F, tol: f64, max_iter: usize) -> f64
where
    F: FnMut(&DVector<f64>) -> DVector<f64>,
{
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618).sin() * 0.1);
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let w = op(&v);
        let next = v.dot(&w);
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        v = w / nw;
        if (next - lambda).abs() <= tol * next.abs() {
            return next;
        }
        lambda = next;
    }
    lambda
}

/// `M1 = tau K`: the x-subproblem
/// `min 1/2 x^T K x - <p, Kx> + tau/2 |x - x^k|^2_K` has the solution
/// `(p + tau x^k) / (1 + tau)`.
#[derive(Debug, Clone)]
pub struct KernelMetric {
    pub tau: f64,
    gram: Arc<DenseMap>,
    lambda_min: f64,
}

impl MetricHook for KernelMetric {
    fn solve(&self, sub: &Subproblem<'_>) -> Result<Vec<f64>> {
        let s = 1.0 / (1.0 + self.tau);
        Ok(sub
            .multiplier
            .iter()
            .zip(sub.prev)
            .map(|(p, x)| (p + self.tau * x) * s)
            .collect())
    }

    fn quad_form(&self, _k: usize, v: &[f64]) -> Option<f64> {
        let kv = self.gram.apply(v).ok()?;
        Some(self.tau * kv.iter().zip(v).map(|(a, b)| a * b).sum::<f64>())
    }

    fn min_eigenvalue(&self, _k: usize) -> Option<f64> {
        Some(self.tau * self.lambda_min)
    }

    fn nonincreasing(&self) -> Option<bool> {
        Some(true)
    }
}

#[derive(Clone)]
pub struct SvmInstance {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
    /// Loss weight `C`.
    pub weight: f64,
    /// Kernel width.
    pub sigma: f64,
    pub gram: Arc<DenseMap>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub problem: TwoBlockProblem,
}

impl std::fmt::Debug for SvmInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SvmInstance")
            .field("points", &self.labels.len())
            .field("weight", &self.weight)
            .field("sigma", &self.sigma)
            .field("lambda_min", &self.lambda_min)
            .field("lambda_max", &self.lambda_max)
            .finish()
    }
}

pub fn build_svm(features: Vec<Vec<f64>>, labels: Vec<f64>, weight: f64, sigma: f64) -> Result<SvmInstance> {
    check_dim("labels", features.len(), labels.len())?;
    if !(weight > 0.0) {
        return Err(Error::Argument(format!("C must be positive, got {weight}")));
    }
    let k = gram_matrix(&features, sigma)?;
    let (lambda_min, lambda_max) = extreme_eigenvalues(&k)?;
    if !(lambda_min > 1e-12) {
        return Err(Error::IllConditioned(format!(
            "Gram matrix is numerically singular (lambda_min = {lambda_min:e}); \
             remove duplicate points or spread the data relative to the kernel width"
        )));
    }
    let n = features.len();
    let gram = Arc::new(DenseMap::from_matrix(k.clone())?.with_norm(lambda_max));
    let hinge = Hinge::new(labels.clone(), weight)?;
    let problem = TwoBlockProblem::new(
        Arc::new(Quadratic::with_spectrum(k, vec![0.0; n], lambda_min, lambda_max)?),
        Arc::new(hinge),
        gram.clone(),
        Arc::new(ScaledMap::new(Arc::new(IdentityMap::new(n)), -1.0)),
        vec![0.0; n],
    )?;
    Ok(SvmInstance {
        features,
        labels,
        weight,
        sigma,
        gram,
        lambda_min,
        lambda_max,
        problem,
    })
}

impl SvmInstance {
    /// `2 lambda_min(K) / |K|^2 - 1e-8`.
    pub fn recommended_stepsize(&self) -> Result<f64> {
        let c = 2.0 * self.lambda_min / (self.lambda_max * self.lambda_max) - 1e-8;
        if !(c > 1e-9) {
            return Err(Error::IllConditioned(format!(
                "recommended stepsize {c:e} is not positive; the Gram matrix is too ill-conditioned"
            )));
        }
        Ok(c)
    }

    pub fn config(&self, c: f64, max_iter: usize, tol: f64) -> SolverConfig {
        SolverConfig::new(c)
            .with_epsilon(1e-9_f64.min(0.5 * c))
            .with_max_iter(max_iter)
            .with_tol(tol)
    }

    pub fn kernel_metric(&self, tau: f64) -> KernelMetric {
        KernelMetric {
            tau,
            gram: self.gram.clone(),
            lambda_min: self.lambda_min,
        }
    }

    /// Metrics for Proximal AMA with `M1 = tau K`. The z-step uses the
    /// induced metric with `sigma = 1/c`, which is `M2 = 0` because
    /// `B = -Id`, so every subproblem is solved in closed form.
    pub fn metrics(&self, tau: f64, c: f64) -> (MetricRule, MetricRule) {
        (
            MetricRule::Custom(Arc::new(self.kernel_metric(tau))),
            MetricRule::Induced(Schedule::Constant(1.0 / c)),
        )
    }

    /// Runs AMA (`tau = 0`) or Proximal AMA (`tau > 0`) from zero.
    pub fn run(
        &self,
        algorithm: Algorithm,
        tau: f64,
        config: &SolverConfig,
        monitor: impl Monitor,
    ) -> Result<RunRecord> {
        let tau = match algorithm {
            Algorithm::Ama => 0.0,
            Algorithm::ProximalAma => tau,
        };
        if !(tau >= 0.0) {
            return Err(Error::Argument(format!("tau must be nonnegative, got {tau}")));
        }
        let (m1, m2) = self.metrics(tau, config.stepsize.at(0));
        let mut rec = solve(
            &self.problem,
            config,
            &m1,
            &m2,
            Algorithm::ProximalAma,
            IterateState::zeros(&self.problem),
            monitor,
        )?;
        rec.algorithm = algorithm;
        Ok(rec)
    }

    /// High-accuracy solution used as the RMSE reference.
    pub fn reference_solution(&self, c: f64, tau: f64, max_iter: usize) -> Result<Vec<f64>> {
        let cfg = self.config(c, max_iter, 1e-12);
        let rec = self.run(Algorithm::ProximalAma, tau, &cfg, crate::solver::NoMonitor)?;
        Ok(rec.final_state.x)
    }
}

/// Records RMSE against a reference and the test misclassification rate.
pub struct SvmMonitor {
    reference: Option<Vec<f64>>,
    test: Option<(DMatrix<f64>, Vec<f64>)>,
}

impl SvmMonitor {
    pub fn new(inst: &SvmInstance, reference: Option<Vec<f64>>, test: Option<(&[Vec<f64>], &[f64])>) -> Result<Self> {
        let test = match test {
            Some((q, y)) => {
                check_dim("test labels", q.len(), y.len())?;
                Some((cross_kernel(&inst.features, q, inst.sigma)?, y.to_vec()))
            }
            None => None,
        };
        Ok(Self { reference, test })
    }
}

impl Monitor for SvmMonitor {
    fn observe(&mut self, obs: &Observation<'_>, out: &mut BTreeMap<String, f64>) -> Result<()> {
        let x = &obs.state.x;
        if let Some(r) = &self.reference {
            out.insert("rmse".into(), rmse(x, r)?);
        }
        if let Some((q, y)) = &self.test {
            let v = q * DVector::from_column_slice(x);
            out.insert("misclass_pct".into(), misclassification_rate(v.as_slice(), y)?);
        }
        Ok(())
    }
}
