//! Numerical check of the energy decrease behind the convergence proof.
//!
//! With a saddle point `(x*, z*, p*)`,
//! `V_k = |p^k - p*|^2 + c_k |z^k - z*|^2_{M2^k}` satisfies
//! `V_{k+1} <= V_k - R_k` with every summand of `R_k` nonnegative, provided
//! `M1 = 0`. For a nonzero `M1` the telescoping also needs the x-block term
//! `c_k |x^k - x*|^2_{M1^k}`, which [`LyapunovTerms::v_full`] includes.

use super::metric::MetricRule;
use super::problem::{IterateState, TwoBlockProblem};
use crate::error::Result;
use crate::linop::fwd;
use crate::vecops::{norm_sq, sub};

#[derive(Debug, Clone, PartialEq)]
pub struct SaddlePoint {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub p: Vec<f64>,
}

impl SaddlePoint {
    pub fn state(&self) -> IterateState {
        IterateState::new(self.x.clone(), self.z.clone(), self.p.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovTerms {
    pub v_k: f64,
    pub v_next: f64,
    /// Named summands of `R_k`.
    pub r: Vec<(&'static str, f64)>,
    /// `(V_k, V_{k+1})` including `c |x - x*|^2_{M1}`.
    pub v_full: (f64, f64),
}

impl LyapunovTerms {
    pub fn r_sum(&self) -> f64 {
        self.r.iter().map(|(_, v)| v).sum()
    }

    /// `V_k - V_{k+1} - R_k`; nonnegative when the inequality holds.
    pub fn slack(&self) -> f64 {
        self.v_k - self.v_next - self.r_sum()
    }

    pub fn slack_full(&self) -> f64 {
        self.v_full.0 - self.v_full.1 - self.r_sum()
    }
}

fn cocoercive_term(h: &dyn crate::prox::ProxFn, l: f64, star: &[f64], prev: &[f64], next: &[f64]) -> f64 {
    // |(grad h(v*) - grad h(v^k))/L + (v^k - v^{k+1})/2|^2
    let gs = h.gradient(star).expect("smooth term has a gradient");
    let gk = h.gradient(prev).expect("smooth term has a gradient");
    let v: Vec<f64> = (0..star.len())
        .map(|i| (gs[i] - gk[i]) / l + 0.5 * (prev[i] - next[i]))
        .collect();
    norm_sq(&v)
}

/// Evaluates `V_k`, `V_{k+1}` and the summands of `R_k` for the transition
/// `prev -> next` (metrics are indexed by `prev.k`).
#[allow(clippy::too_many_arguments)]
pub fn lyapunov_diagnostics(
    problem: &TwoBlockProblem,
    prev: &IterateState,
    next: &IterateState,
    saddle: &SaddlePoint,
    c_k: f64,
    c_next: f64,
    m1: &MetricRule,
    m2: &MetricRule,
) -> Result<LyapunovTerms> {
    let b = problem.b.as_ref();
    let k = prev.k;
    let (l1, l2) = (problem.l1(), problem.l2());

    let energy = |s: &IterateState, kk: usize, c: f64| -> Result<(f64, f64)> {
        let dp = norm_sq(&sub(&s.p, &saddle.p));
        let dz = m2.quad_form(kk, &sub(&s.z, &saddle.z), c, b)?;
        let dx = if m1.is_zero() {
            0.0
        } else {
            m1.quad_form(kk, &sub(&s.x, &saddle.x), c, b)?
        };
        Ok((dp + c * dz, dp + c * dz + c * dx))
    };
    let (v_k, vf_k) = energy(prev, k, c_k)?;
    let (v_next, vf_next) = energy(next, k + 1, c_next)?;

    let a_norm = problem.a_norm();
    let dx_star = norm_sq(&sub(&next.x, &saddle.x));
    let b_dz = norm_sq(&fwd(b, &sub(&next.z, &saddle.z)));
    let step_z = sub(&prev.z, &next.z);
    let step_x = sub(&prev.x, &next.x);
    let z_metric = m2.quad_form(k, &step_z, c_k, b)? - 0.5 * l2 * norm_sq(&step_z);
    let x_metric = if m1.is_zero() {
        0.0
    } else {
        m1.quad_form(k, &step_x, c_k, b)?
    } - 0.5 * l1 * norm_sq(&step_x);

    let mut r = vec![
        (
            "strong_convexity",
            c_k * (2.0 * problem.gamma() - c_k * a_norm * a_norm) * dx_star,
        ),
        ("constraint", c_k * c_k * b_dz),
        ("z_metric", c_k * z_metric),
        ("x_metric", c_k * x_metric),
    ];
    if let Some(h) = problem.h1.as_ref().filter(|_| l1 > 0.0) {
        r.push((
            "h1_cocoercive",
            2.0 * c_k * l1 * cocoercive_term(h.as_ref(), l1, &saddle.x, &prev.x, &next.x),
        ));
    }
    if let Some(h) = problem.h2.as_ref().filter(|_| l2 > 0.0) {
        r.push((
            "h2_cocoercive",
            2.0 * c_k * l2 * cocoercive_term(h.as_ref(), l2, &saddle.z, &prev.z, &next.z),
        ));
    }
    Ok(LyapunovTerms {
        v_k,
        v_next,
        r,
        v_full: (vf_k, vf_next),
    })
}
