//! Single iterations of AMA and Proximal AMA.

use nalgebra::DVector;

use super::config::InnerSettings;
use super::fista::fista;
use super::metric::{MetricRule, Subproblem};
use super::problem::{IterateState, TwoBlockProblem};
use crate::error::{check_dim, Error, Result};
use crate::linop::{adj, fwd};
use crate::vecops::all_finite;

/// Bookkeeping from one iteration.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    /// FISTA iterations spent on the z-subproblem (0 for a closed form).
    pub inner_iterations: usize,
    pub inner_residual: f64,
}

fn finite_or(iter: usize, what: &str, v: &[f64]) -> Result<()> {
    if all_finite(v) {
        Ok(())
    } else {
        Err(Error::Numerical {
            iter,
            what: what.to_string(),
        })
    }
}

/// `w - grad h(v)`, or `w` untouched when `h` is absent.
fn subtract_gradient(mut w: Vec<f64>, h: Option<&std::sync::Arc<dyn crate::prox::ProxFn>>, at: &[f64]) -> Vec<f64> {
    if let Some(h) = h {
        let g = h.gradient(at).expect("smooth term has a gradient");
        for (wi, gi) in w.iter_mut().zip(&g) {
            *wi -= gi;
        }
    }
    w
}

fn x_update(problem: &TwoBlockProblem, state: &IterateState, c: f64, m1: &MetricRule) -> Result<Vec<f64>> {
    let w = subtract_gradient(adj(problem.a.as_ref(), &state.p), problem.h1.as_ref(), &state.x);
    let unsupported = |what: &str| Error::Unsupported(format!("x-subproblem with {what}"));
    match m1 {
        MetricRule::Zero => problem
            .f
            .argmin_linear(&w)
            .ok_or_else(|| unsupported("a zero metric needs a closed-form argmin of f - <w, x>")),
        MetricRule::ScaledIdentity(s) => {
            let alpha = s.at(state.k);
            if alpha == 0.0 {
                return problem
                    .f
                    .argmin_linear(&w)
                    .ok_or_else(|| unsupported("alpha_k = 0 needs a closed-form argmin"));
            }
            let v: Vec<f64> = state.x.iter().zip(&w).map(|(x, wi)| x + wi / alpha).collect();
            let mut out = vec![0.0; v.len()];
            problem.f.prox_into(1.0 / alpha, &v, &mut out);
            Ok(out)
        }
        MetricRule::Custom(h) => {
            let x = h.solve(&Subproblem {
                k: state.k,
                prev: &state.x,
                multiplier: &state.p,
                linear: &w,
                offset: None,
                stepsize: c,
            })?;
            check_dim("custom x-step", problem.x_dim(), x.len())?;
            Ok(x)
        }
        MetricRule::Induced(_) => Err(unsupported("the induced metric (z-block only)")),
        MetricRule::Dense(_) => Err(unsupported("a dense metric; supply a custom solve hook")),
    }
}

/// Solves `min g(z) - <w, z> + (c/2)|Bz + r|^2 + (1/2)|z - z^k|^2_{M2}` where
/// `w = B^*p - grad h2(z^k)` and `r = A x^{k+1} - b`. Shared by both methods so
/// that Proximal AMA with zero metrics reproduces AMA bit for bit.
fn z_update(
    problem: &TwoBlockProblem,
    state: &IterateState,
    offset: &[f64],
    c: f64,
    m2: &MetricRule,
    inner: &InnerSettings,
) -> Result<(Vec<f64>, StepStats)> {
    let b = problem.b.as_ref();
    let k = state.k;
    let w = subtract_gradient(adj(b, &state.p), problem.h2.as_ref(), &state.z);

    if let MetricRule::Induced(s) = m2 {
        if inner.z_closed_form {
            // prox_{sigma g}(z - sigma grad h2(z) + sigma c B^*(b - Ax - Bz) + sigma B^*p)
            let sigma = s.at(k);
            let mut r = fwd(b, &state.z);
            for (ri, oi) in r.iter_mut().zip(offset) {
                *ri = -(*ri + oi);
            }
            let btr = adj(b, &r);
            let v: Vec<f64> = (0..state.z.len())
                .map(|i| state.z[i] + sigma * (w[i] + c * btr[i]))
                .collect();
            let mut z = vec![0.0; v.len()];
            problem.g.prox_into(sigma, &v, &mut z);
            return Ok((z, StepStats::default()));
        }
    }
    if let MetricRule::Custom(h) = m2 {
        let z = h.solve(&Subproblem {
            k,
            prev: &state.z,
            multiplier: &state.p,
            linear: &w,
            offset: Some(offset),
            stepsize: c,
        })?;
        check_dim("custom z-step", problem.z_dim(), z.len())?;
        return Ok((z, StepStats::default()));
    }

    let b_norm = problem.b_norm();
    let mut lipschitz = c * b_norm * b_norm + m2.norm_upper(k, c, b_norm);
    if !(lipschitz > 0.0) {
        // purely linear smooth part; any positive step works
        lipschitz = 1.0;
    }
    let dense = m2.dense_at(k).cloned();
    let zk = &state.z;
    let mut bz = vec![0.0; problem.rows()];
    let mut btr = vec![0.0; zk.len()];
    let grad = |z: &[f64], out: &mut [f64]| {
        b.apply_into(z, &mut bz);
        for (v, o) in bz.iter_mut().zip(offset) {
            *v = c * (*v + o);
        }
        b.adjoint_into(&bz, &mut btr);
        for i in 0..out.len() {
            out[i] = btr[i] - w[i];
        }
        match m2 {
            MetricRule::Zero => {}
            MetricRule::ScaledIdentity(s) => {
                let a = s.at(k);
                for i in 0..out.len() {
                    out[i] += a * (z[i] - zk[i]);
                }
            }
            MetricRule::Induced(s) => {
                let inv_sigma = 1.0 / s.at(k);
                let d: Vec<f64> = z.iter().zip(zk).map(|(u, v)| u - v).collect();
                let bd = fwd(b, &d);
                let btbd = adj(b, &bd);
                for i in 0..out.len() {
                    out[i] += inv_sigma * d[i] - c * btbd[i];
                }
            }
            MetricRule::Dense(_) => {
                let m = dense.as_ref().expect("dense metric");
                let d = DVector::from_iterator(z.len(), z.iter().zip(zk).map(|(u, v)| u - v));
                let md = m * d;
                for i in 0..out.len() {
                    out[i] += md[i];
                }
            }
            MetricRule::Custom(_) => unreachable!("handled above"),
        }
    };
    let g = problem.g.as_ref();
    let out = fista(grad, lipschitz, |t, v, o| g.prox_into(t, v, o), zk, inner)?;
    Ok((
        out.x,
        StepStats {
            inner_iterations: out.iterations,
            inner_residual: out.gradient_mapping,
        },
    ))
}

fn finish(
    problem: &TwoBlockProblem,
    state: &IterateState,
    x: Vec<f64>,
    ax: Vec<f64>,
    z: Vec<f64>,
    c: f64,
) -> Result<IterateState> {
    let bz = fwd(problem.b.as_ref(), &z);
    let mut p = state.p.clone();
    for i in 0..p.len() {
        p[i] += c * (problem.rhs[i] - ax[i] - bz[i]);
    }
    finite_or(state.k + 1, "multiplier update", &p)?;
    Ok(IterateState {
        x,
        z,
        p,
        k: state.k + 1,
    })
}

pub(crate) fn proximal_ama_step_stats(
    problem: &TwoBlockProblem,
    state: &IterateState,
    c: f64,
    m1: &MetricRule,
    m2: &MetricRule,
    inner: &InnerSettings,
) -> Result<(IterateState, StepStats)> {
    state.check_dims(problem)?;
    let x = x_update(problem, state, c, m1)?;
    finite_or(state.k + 1, "x-update", &x)?;
    let ax = fwd(problem.a.as_ref(), &x);
    let offset: Vec<f64> = ax.iter().zip(&problem.rhs).map(|(u, v)| u - v).collect();
    let (z, stats) = z_update(problem, state, &offset, c, m2, inner)?;
    finite_or(state.k + 1, "z-update", &z)?;
    Ok((finish(problem, state, x, ax, z, c)?, stats))
}

pub(crate) fn ama_step_stats(
    problem: &TwoBlockProblem,
    state: &IterateState,
    c: f64,
    inner: &InnerSettings,
) -> Result<(IterateState, StepStats)> {
    if problem.h1.is_some() || problem.h2.is_some() {
        return Err(Error::Unsupported(
            "classical AMA has no smooth terms; use Proximal AMA".into(),
        ));
    }
    proximal_ama_step_stats(problem, state, c, &MetricRule::Zero, &MetricRule::Zero, inner)
}

/// One AMA iteration: exact x-step, inner-FISTA z-step, multiplier update.
pub fn ama_step(
    problem: &TwoBlockProblem,
    state: &IterateState,
    c: f64,
    inner: &InnerSettings,
) -> Result<IterateState> {
    ama_step_stats(problem, state, c, inner).map(|(s, _)| s)
}

/// One Proximal AMA iteration with metrics `M1^k`, `M2^k` taken at `state.k`.
pub fn proximal_ama_step(
    problem: &TwoBlockProblem,
    state: &IterateState,
    c: f64,
    m1: &MetricRule,
    m2: &MetricRule,
    inner: &InnerSettings,
) -> Result<IterateState> {
    proximal_ama_step_stats(problem, state, c, m1, m2, inner).map(|(s, _)| s)
}
