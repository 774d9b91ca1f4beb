//! Reference computations that do not share code paths with the solvers:
//! a direct KKT solve for quadratic instances, brute-force prox evaluation in
//! one or two dimensions, and a sampled subgradient-inequality check.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::SaddlePoint;

/// `min 1/2 x^T P x + q^T x + 1/2 z^T Q z + r^T z  s.t.  Ax + Bz = b`.
///
/// The optional fields are solver hints read by the command-line driver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticInstance {
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    pub q: Vec<f64>,
    #[serde(rename = "Q")]
    pub qz: Vec<Vec<f64>>,
    pub r: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b_mat: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    /// Constant stepsize.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// `M1 = alpha Id`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Induced `M2` with this `sigma`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map(|x| x.len()).unwrap_or(0);
    if r == 0 || c == 0 {
        return Err(Error::Argument(format!("matrix {name} is empty")));
    }
    if rows.iter().any(|x| x.len() != c) {
        return Err(Error::Argument(format!("matrix {name} has ragged rows")));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn rows_from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl QuadraticInstance {
    /// `P = Q = I`, `A = I`, `B = -I`, `q = r = 0`.
    pub fn identity_coupled(b: Vec<f64>) -> Self {
        let n = b.len();
        let id = DMatrix::<f64>::identity(n, n);
        Self {
            p: rows_from_matrix(&id),
            q: vec![0.0; n],
            qz: rows_from_matrix(&id),
            r: vec![0.0; n],
            a: rows_from_matrix(&id),
            b_mat: rows_from_matrix(&(-id)),
            b,
            c: None,
            alpha: None,
            sigma: None,
        }
    }

    /// Dense matrices `(P, Q, A, B)` after shape checks.
    pub fn matrices(&self) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
        let p = matrix_from_rows(&self.p, "P")?;
        let qz = matrix_from_rows(&self.qz, "Q")?;
        let a = matrix_from_rows(&self.a, "A")?;
        let bm = matrix_from_rows(&self.b_mat, "B")?;
        let (n, m, rows) = (a.ncols(), bm.ncols(), self.b.len());
        let shape_err = |what: &str| Err(Error::Argument(format!("inconsistent shapes: {what}")));
        if p.nrows() != n || p.ncols() != n || self.q.len() != n {
            return shape_err("P and q must match the columns of A");
        }
        if qz.nrows() != m || qz.ncols() != m || self.r.len() != m {
            return shape_err("Q and r must match the columns of B");
        }
        if a.nrows() != rows || bm.nrows() != rows {
            return shape_err("A and B must have as many rows as b");
        }
        Ok((p, qz, a, bm))
    }

    /// Random instance with `P` well conditioned, `Q` positive semidefinite
    /// and `B` of full column rank (`z_dim <= rows`).
    pub fn random(x_dim: usize, z_dim: usize, rows: usize, seed: u64) -> Self {
        assert!(z_dim <= rows, "B needs full column rank");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gauss =
            |r: usize, c: usize| -> DMatrix<f64> { DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(&mut rng)) };
        let gp = gauss(x_dim, x_dim);
        let p = &gp * gp.transpose() / x_dim as f64 + DMatrix::identity(x_dim, x_dim);
        let gq = gauss(z_dim, z_dim.div_ceil(2));
        let qz = &gq * gq.transpose() / z_dim as f64;
        let a = gauss(rows, x_dim) / (rows as f64).sqrt();
        // diagonally boosted block keeps B injective
        let mut bm = gauss(rows, z_dim) * 0.3;
        for i in 0..z_dim {
            bm[(i, i)] += 1.0;
        }
        let sym = |m: DMatrix<f64>| (&m + m.transpose()) * 0.5;
        let vec = |v: DMatrix<f64>| v.as_slice().to_vec();
        Self {
            p: rows_from_matrix(&sym(p)),
            q: vec(gauss(x_dim, 1)),
            qz: rows_from_matrix(&sym(qz)),
            r: vec(gauss(z_dim, 1)),
            a: rows_from_matrix(&a),
            b_mat: rows_from_matrix(&bm),
            b: vec(gauss(rows, 1)),
            c: None,
            alpha: None,
            sigma: None,
        }
    }
}

/// Solves `[P 0 -A^T; 0 Q -B^T; A B 0] (x, z, p) = (-q, -r, b)` by LU
/// factorization.
pub fn quadratic_saddle(inst: &QuadraticInstance) -> Result<SaddlePoint> {
    let (p, qz, a, bm) = inst.matrices()?;
    let (n, m, rows) = (a.ncols(), bm.ncols(), a.nrows());
    let size = n + m + rows;
    let mut kkt = DMatrix::zeros(size, size);
    kkt.view_mut((0, 0), (n, n)).copy_from(&p);
    kkt.view_mut((n, n), (m, m)).copy_from(&qz);
    kkt.view_mut((0, n + m), (n, rows)).copy_from(&(-a.transpose()));
    kkt.view_mut((n, n + m), (m, rows)).copy_from(&(-bm.transpose()));
    kkt.view_mut((n + m, 0), (rows, n)).copy_from(&a);
    kkt.view_mut((n + m, n), (rows, m)).copy_from(&bm);
    let mut rhs = DVector::zeros(size);
    for i in 0..n {
        rhs[i] = -inst.q[i];
    }
    for i in 0..m {
        rhs[n + i] = -inst.r[i];
    }
    for i in 0..rows {
        rhs[n + m + i] = inst.b[i];
    }
    // reject numerically singular systems instead of returning noise
    let sv = kkt.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if !(smin > 1e-12 * smax.max(1.0)) {
        return Err(Error::Degenerate(format!(
            "KKT matrix is singular (sigma_min = {smin:e}, sigma_max = {smax:e})"
        )));
    }
    let sol = kkt
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("KKT matrix is singular".into()))?;
    Ok(SaddlePoint {
        x: sol.rows(0, n).iter().cloned().collect(),
        z: sol.rows(n, m).iter().cloned().collect(),
        p: sol.rows(n + m, rows).iter().cloned().collect(),
    })
}

/// Brute-force `argmin_y gamma value(y) + 1/2 |y - x|^2` over a grid on
/// `bounds` with `grid_n` points per axis, followed by a few zoomed grids of
/// the same size around the best point. `x` has one or two entries.
pub fn prox_grid_oracle<F>(value: F, gamma: f64, x: &[f64], bounds: &[(f64, f64)], grid_n: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    let d = x.len();
    if d == 0 || d > 2 || bounds.len() != d {
        return Err(Error::Argument(format!(
            "grid oracle supports 1 or 2 dimensions with matching bounds, got {d}"
        )));
    }
    if grid_n < 2 {
        return Err(Error::Argument("grid needs at least two points per axis".into()));
    }
    let objective = |y: &[f64]| {
        let v = value(y);
        let q: f64 = y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        gamma * v + 0.5 * q
    };
    let search = |bounds: &[(f64, f64)]| -> (Vec<f64>, Vec<f64>) {
        let steps: Vec<f64> = bounds.iter().map(|(lo, hi)| (hi - lo) / (grid_n - 1) as f64).collect();
        let mut best = (f64::INFINITY, vec![bounds[0].0; d]);
        let mut y = vec![0.0; d];
        let outer = if d == 2 { grid_n } else { 1 };
        for i in 0..grid_n {
            y[0] = bounds[0].0 + i as f64 * steps[0];
            for j in 0..outer {
                if d == 2 {
                    y[1] = bounds[1].0 + j as f64 * steps[1];
                }
                let v = objective(&y);
                if v < best.0 {
                    best = (v, y.clone());
                }
            }
        }
        (best.1, steps)
    };
    let (mut best, mut steps) = search(bounds);
    let mut window: Vec<(f64, f64)> = bounds.to_vec();
    for _ in 0..REFINEMENT_PASSES {
        // On a curved boundary the grid minimizer can sit about sqrt(h * span)
        // away along the boundary, so the next window is at least that wide.
        let local: Vec<(f64, f64)> = best
            .iter()
            .zip(&steps)
            .zip(window.iter().zip(bounds))
            .map(|((c, h), ((wlo, whi), (lo, hi)))| {
                let half = (2.0 * h).max((h * (whi - wlo)).sqrt());
                ((c - half).max(*lo), (c + half).min(*hi))
            })
            .collect();
        let (fine, fine_steps) = search(&local);
        if objective(&fine) <= objective(&best) {
            best = fine;
        }
        steps = fine_steps;
        window = local;
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub passed: bool,
    /// Smallest observed `value(y) - value(p) - <u, y - p>`.
    pub worst_slack: f64,
    pub samples: usize,
}

const REFINEMENT_PASSES: usize = 4;

/// Absolute slack allowed by [`subgradient_certificate`].
pub const CERTIFICATE_SLACK: f64 = 1e-9;

/// Checks that `p` is consistent with `p = prox_{gamma value}(x)`, i.e. that
/// `u = (x - p)/gamma` satisfies the subgradient inequality
/// `value(y) >= value(p) + <u, y - p>` at seeded random points and axis
/// perturbations of several sizes.
pub fn subgradient_certificate<F>(
    value: F,
    gamma: f64,
    x: &[f64],
    p: &[f64],
    sample_count: usize,
    seed: u64,
) -> Certificate
where
    F: Fn(&[f64]) -> f64,
{
    let fp = value(p);
    if !fp.is_finite() {
        return Certificate {
            passed: false,
            worst_slack: f64::NEG_INFINITY,
            samples: 0,
        };
    }
    let u: Vec<f64> = x.iter().zip(p).map(|(a, b)| (a - b) / gamma).collect();
    let scale = 1.0 + p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = f64::INFINITY;
    let mut samples = 0;
    let mut check = |y: &[f64]| {
        let fy = value(y);
        if fy.is_finite() {
            let lin: f64 = u.iter().zip(y).zip(p).map(|((ui, yi), pi)| ui * (yi - pi)).sum();
            worst = worst.min(fy - fp - lin);
        }
        samples += 1;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = p.to_vec();
    for s in 0..sample_count {
        let radius = scale * [1e-6, 1e-3, 1e-1, 1.0, 10.0][s % 5];
        for (yi, pi) in y.iter_mut().zip(p) {
            let g: f64 = StandardNormal.sample(&mut rng);
            *yi = pi + radius * g;
        }
        check(&y);
    }
    for delta in [1e-6, 1e-3, 1.0] {
        for i in 0..p.len() {
            for sign in [-1.0, 1.0] {
                y.copy_from_slice(p);
                y[i] += sign * delta * scale;
                check(&y);
            }
        }
    }
    // random convex combinations with x probe the segment towards the input
    for _ in 0..sample_count.min(20) {
        let t: f64 = rng.random();
        for ((yi, pi), xi) in y.iter_mut().zip(p).zip(x) {
            *yi = pi + t * (xi - pi);
        }
        check(&y);
    }
    Certificate {
        passed: worst >= -CERTIFICATE_SLACK,
        worst_slack: worst,
        samples,
    }
}
