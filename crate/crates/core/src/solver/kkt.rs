use super::problem::{IterateState, TwoBlockProblem};
use crate::linop::adj;
use crate::prox::ProxFn;
use crate::vecops::dist;
use std::sync::Arc;

/// Optimality residuals; all three vanish exactly at a saddle point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    /// `|x - prox_f(x + A^*p - grad h1(x))|`
    pub r_f: f64,
    /// `|z - prox_g(z + B^*p - grad h2(z))|`
    pub r_g: f64,
    /// `|Ax + Bz - b|`
    pub r_feas: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.r_f.max(self.r_g).max(self.r_feas)
    }
}

fn block_residual(fun: &dyn ProxFn, h: Option<&Arc<dyn ProxFn>>, v: &[f64], dual: Vec<f64>) -> f64 {
    let mut arg = dual;
    for (a, vi) in arg.iter_mut().zip(v) {
        *a += vi;
    }
    if let Some(h) = h {
        let g = h.gradient(v).expect("smooth term has a gradient");
        for (a, gi) in arg.iter_mut().zip(&g) {
            *a -= gi;
        }
    }
    let mut out = vec![0.0; v.len()];
    fun.prox_into(1.0, &arg, &mut out);
    dist(v, &out)
}

pub fn kkt_residuals(problem: &TwoBlockProblem, state: &IterateState) -> KktResiduals {
    let r_f = block_residual(
        problem.f.as_ref(),
        problem.h1.as_ref(),
        &state.x,
        adj(problem.a.as_ref(), &state.p),
    );
    let r_g = block_residual(
        problem.g.as_ref(),
        problem.h2.as_ref(),
        &state.z,
        adj(problem.b.as_ref(), &state.p),
    );
    KktResiduals {
        r_f,
        r_g,
        r_feas: problem.feasibility(&state.x, &state.z),
    }
}
