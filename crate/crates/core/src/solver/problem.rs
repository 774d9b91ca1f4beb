use std::fmt;
use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::linop::{estimate_norm, fwd, norm_upper, LinearMap};
use crate::prox::ProxFn;
use crate::vecops::norm;

/// `min f(x) + h1(x) + g(z) + h2(z)  s.t.  A x + B z = rhs`, with `f`
/// strongly convex and `h1`, `h2` smooth.
#[derive(Clone)]
pub struct TwoBlockProblem {
    pub f: Arc<dyn ProxFn>,
    pub h1: Option<Arc<dyn ProxFn>>,
    pub g: Arc<dyn ProxFn>,
    pub h2: Option<Arc<dyn ProxFn>>,
    pub a: Arc<dyn LinearMap>,
    pub b: Arc<dyn LinearMap>,
    pub rhs: Vec<f64>,
    a_norm: f64,
    b_norm: f64,
}

impl fmt::Debug for TwoBlockProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoBlockProblem")
            .field("x_dim", &self.x_dim())
            .field("z_dim", &self.z_dim())
            .field("rows", &self.rhs.len())
            .field("gamma", &self.gamma())
            .field("h1", &self.h1.is_some())
            .field("h2", &self.h2.is_some())
            .finish()
    }
}

fn check_smooth(name: &str, h: &dyn ProxFn) -> Result<()> {
    let l = h
        .lipschitz()
        .ok_or_else(|| Error::Argument(format!("{name} needs a Lipschitz constant")))?;
    if !(l >= 0.0) {
        return Err(Error::Argument(format!(
            "{name} Lipschitz constant must be >= 0, got {l}"
        )));
    }
    if h.gradient(&vec![0.0; h.dim()]).is_none() {
        return Err(Error::Argument(format!("{name} needs a gradient")));
    }
    Ok(())
}

impl TwoBlockProblem {
    pub fn new(
        f: Arc<dyn ProxFn>,
        g: Arc<dyn ProxFn>,
        a: Arc<dyn LinearMap>,
        b: Arc<dyn LinearMap>,
        rhs: Vec<f64>,
    ) -> Result<Self> {
        check_dim("f domain vs A columns", a.in_dim(), f.dim())?;
        check_dim("g domain vs B columns", b.in_dim(), g.dim())?;
        check_dim("A rows vs b", rhs.len(), a.out_dim())?;
        check_dim("B rows vs b", rhs.len(), b.out_dim())?;
        let gamma = f.strong_convexity();
        if !(gamma > 0.0) {
            return Err(Error::Argument(format!(
                "f must be strongly convex, modulus is {gamma}"
            )));
        }
        if estimate_norm(a.as_ref(), 50, 1e-6) == 0.0 {
            return Err(Error::Argument("A must not be the zero operator".into()));
        }
        let a_norm = norm_upper(a.as_ref());
        let b_norm = norm_upper(b.as_ref());
        Ok(Self {
            f,
            h1: None,
            g,
            h2: None,
            a,
            b,
            rhs,
            a_norm,
            b_norm,
        })
    }

    pub fn with_h1(mut self, h1: Arc<dyn ProxFn>) -> Result<Self> {
        check_dim("h1 domain", self.x_dim(), h1.dim())?;
        check_smooth("h1", h1.as_ref())?;
        self.h1 = Some(h1);
        Ok(self)
    }

    pub fn with_h2(mut self, h2: Arc<dyn ProxFn>) -> Result<Self> {
        check_dim("h2 domain", self.z_dim(), h2.dim())?;
        check_smooth("h2", h2.as_ref())?;
        self.h2 = Some(h2);
        Ok(self)
    }

    pub fn x_dim(&self) -> usize {
        self.a.in_dim()
    }

    pub fn z_dim(&self) -> usize {
        self.b.in_dim()
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    /// Strong convexity modulus of `f`.
    pub fn gamma(&self) -> f64 {
        self.f.strong_convexity()
    }

    /// Upper bound on `|A|` (exact when the operator knows its norm).
    pub fn a_norm(&self) -> f64 {
        self.a_norm
    }

    pub fn b_norm(&self) -> f64 {
        self.b_norm
    }

    pub fn l1(&self) -> f64 {
        self.h1.as_ref().and_then(|h| h.lipschitz()).unwrap_or(0.0)
    }

    pub fn l2(&self) -> f64 {
        self.h2.as_ref().and_then(|h| h.lipschitz()).unwrap_or(0.0)
    }

    /// `f(x) + h1(x) + g(z) + h2(z)`.
    pub fn objective(&self, x: &[f64], z: &[f64]) -> f64 {
        let mut v = self.f.value(x) + self.g.value(z);
        if let Some(h) = &self.h1 {
            v += h.value(x);
        }
        if let Some(h) = &self.h2 {
            v += h.value(z);
        }
        v
    }

    /// `A x + B z - b`.
    pub fn constraint_residual(&self, x: &[f64], z: &[f64]) -> Vec<f64> {
        let ax = fwd(self.a.as_ref(), x);
        let bz = fwd(self.b.as_ref(), z);
        ax.iter().zip(&bz).zip(&self.rhs).map(|((u, v), w)| u + v - w).collect()
    }

    pub fn feasibility(&self, x: &[f64], z: &[f64]) -> f64 {
        norm(&self.constraint_residual(x, z))
    }
}

/// `(x^k, z^k, p^k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub p: Vec<f64>,
    pub k: usize,
}

impl IterateState {
    pub fn new(x: Vec<f64>, z: Vec<f64>, p: Vec<f64>) -> Self {
        Self { x, z, p, k: 0 }
    }

    pub fn zeros(problem: &TwoBlockProblem) -> Self {
        Self::new(
            vec![0.0; problem.x_dim()],
            vec![0.0; problem.z_dim()],
            vec![0.0; problem.rows()],
        )
    }

    pub fn check_dims(&self, problem: &TwoBlockProblem) -> Result<()> {
        check_dim("state x", problem.x_dim(), self.x.len())?;
        check_dim("state z", problem.z_dim(), self.z.len())?;
        check_dim("state p", problem.rows(), self.p.len())
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.z).chain(&self.p).all(|v| v.is_finite())
    }

    /// Euclidean distance between stacked `(x, z, p)` triples.
    pub fn distance(&self, x: &[f64], z: &[f64], p: &[f64]) -> f64 {
        let sq = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>();
        (sq(&self.x, x) + sq(&self.z, z) + sq(&self.p, p)).sqrt()
    }
}
