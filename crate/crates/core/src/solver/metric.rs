use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::config::Schedule;
use crate::error::{Error, Result};
use crate::linop::{adj, fwd, LinearMap};
use crate::vecops::{dot, norm_sq};

/// Data handed to a [`MetricHook`] when it solves one metric-regularized
/// subproblem.
#[derive(Debug, Clone, Copy)]
pub struct Subproblem<'a> {
    pub k: usize,
    /// Current block iterate (`x^k` or `z^k`).
    pub prev: &'a [f64],
    /// Current multiplier `p^k`.
    pub multiplier: &'a [f64],
    /// Linear term: `A^* p - grad h1(x^k)` for the x-block, `B^* p - grad h2(z^k)`
    /// for the z-block.
    pub linear: &'a [f64],
    /// `A x^{k+1} - b` for the z-block, `None` for the x-block.
    pub offset: Option<&'a [f64]>,
    pub stepsize: f64,
}

/// Problem-specific solver for a subproblem regularized by a custom metric.
pub trait MetricHook: Send + Sync {
    fn solve(&self, sub: &Subproblem<'_>) -> Result<Vec<f64>>;

    /// `<v, M^k v>`, if the hook can evaluate it.
    fn quad_form(&self, _k: usize, _v: &[f64]) -> Option<f64> {
        None
    }

    /// A lower bound on the smallest eigenvalue of `M^k`.
    fn min_eigenvalue(&self, _k: usize) -> Option<f64> {
        None
    }

    /// Whether `M^k >= M^{k+1}` in the Loewner order for every `k`.
    fn nonincreasing(&self) -> Option<bool> {
        None
    }

    /// Number of leading iterations after which `M^k` no longer changes.
    fn horizon(&self) -> usize {
        1
    }
}

/// A sequence of positive semidefinite metrics `M^k`.
#[derive(Clone)]
pub enum MetricRule {
    Zero,
    /// `alpha_k Id`.
    ScaledIdentity(Schedule),
    /// `(1/sigma_k) Id - c_k B^* B`, which turns the z-step into a prox step.
    Induced(Schedule),
    /// Explicit symmetric matrices; the last one repeats.
    Dense(Vec<DMatrix<f64>>),
    Custom(Arc<dyn MetricHook>),
}

impl fmt::Debug for MetricRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricRule::Zero => write!(f, "Zero"),
            MetricRule::ScaledIdentity(s) => write!(f, "ScaledIdentity({s:?})"),
            MetricRule::Induced(s) => write!(f, "Induced({s:?})"),
            MetricRule::Dense(m) => write!(f, "Dense({} matrices)", m.len()),
            MetricRule::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl MetricRule {
    pub fn is_zero(&self) -> bool {
        matches!(self, MetricRule::Zero)
    }

    pub fn horizon(&self) -> usize {
        match self {
            MetricRule::Zero => 1,
            MetricRule::ScaledIdentity(s) | MetricRule::Induced(s) => s.horizon(),
            MetricRule::Dense(m) => m.len().max(1),
            MetricRule::Custom(h) => h.horizon(),
        }
    }

    pub(crate) fn dense_at(&self, k: usize) -> Option<&DMatrix<f64>> {
        match self {
            MetricRule::Dense(m) if !m.is_empty() => Some(&m[k.min(m.len() - 1)]),
            _ => None,
        }
    }

    /// `M^k v`. `b` and `c` are only used by the induced form.
    pub fn apply(&self, k: usize, v: &[f64], c: f64, b: &dyn LinearMap) -> Result<Vec<f64>> {
        match self {
            MetricRule::Zero => Ok(vec![0.0; v.len()]),
            MetricRule::ScaledIdentity(s) => {
                let a = s.at(k);
                Ok(v.iter().map(|x| a * x).collect())
            }
            MetricRule::Induced(s) => {
                let inv_sigma = 1.0 / s.at(k);
                let btb = adj(b, &fwd(b, v));
                Ok(v.iter().zip(&btb).map(|(x, y)| inv_sigma * x - c * y).collect())
            }
            MetricRule::Dense(_) => {
                let m = self
                    .dense_at(k)
                    .ok_or_else(|| Error::Argument("empty dense metric".into()))?;
                Ok((m * DVector::from_column_slice(v)).as_slice().to_vec())
            }
            MetricRule::Custom(_) => Err(Error::Unsupported(
                "custom metric cannot be applied outside its solve hook".into(),
            )),
        }
    }

    /// `|v|^2_{M^k}`.
    pub fn quad_form(&self, k: usize, v: &[f64], c: f64, b: &dyn LinearMap) -> Result<f64> {
        match self {
            MetricRule::Zero => Ok(0.0),
            MetricRule::ScaledIdentity(s) => Ok(s.at(k) * norm_sq(v)),
            MetricRule::Induced(s) => Ok(norm_sq(v) / s.at(k) - c * norm_sq(&fwd(b, v))),
            MetricRule::Dense(_) => Ok(dot(v, &self.apply(k, v, c, b)?)),
            MetricRule::Custom(h) => h
                .quad_form(k, v)
                .ok_or_else(|| Error::Unsupported("custom metric has no quadratic form".into())),
        }
    }

    /// Upper bound on `|M^k|`, used as part of the inner Lipschitz constant.
    pub(crate) fn norm_upper(&self, k: usize, c: f64, b_norm: f64) -> f64 {
        match self {
            MetricRule::Zero | MetricRule::Custom(_) => 0.0,
            MetricRule::ScaledIdentity(s) => s.at(k).abs(),
            // (1/sigma) Id - c B^*B has spectrum in [1/sigma - c|B|^2, 1/sigma]
            MetricRule::Induced(s) => (1.0 / s.at(k)).max(c * b_norm * b_norm - 1.0 / s.at(k)),
            MetricRule::Dense(_) => {
                let m = self.dense_at(k).expect("dense metric has a matrix");
                m.clone()
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .fold(0.0f64, |acc, v| acc.max(v.abs()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::make_dense;

    #[test]
    fn induced_quadratic_form() {
        let b = make_dense(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        let m = MetricRule::Induced(Schedule::Constant(0.1));
        let v = [0.5, -1.0];
        // (1/0.1)|v|^2 - 2 |Bv|^2
        let bv = [0.5 - 2.0, -1.0];
        let expected = 10.0 * 1.25 - 2.0 * (bv[0] * bv[0] + bv[1] * bv[1]);
        assert!((m.quad_form(0, &v, 2.0, &b).unwrap() - expected).abs() < 1e-12);
        let mv = m.apply(0, &v, 2.0, &b).unwrap();
        assert!((dot(&mv, &v) - expected).abs() < 1e-12);
    }

    #[test]
    fn dense_repeats_last() {
        let m = MetricRule::Dense(vec![DMatrix::identity(2, 2) * 3.0, DMatrix::identity(2, 2)]);
        let b = make_dense(&[vec![1.0, 0.0]]).unwrap();
        assert_eq!(m.quad_form(0, &[1.0, 1.0], 1.0, &b).unwrap(), 6.0);
        assert_eq!(m.quad_form(7, &[1.0, 1.0], 1.0, &b).unwrap(), 2.0);
        assert_eq!(m.horizon(), 2);
    }
}
