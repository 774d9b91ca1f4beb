//! Two-block problems with quadratic objectives, used for oracle checks.

use std::sync::Arc;

use crate::error::Result;
use crate::linop::DenseMap;
use crate::oracle::QuadraticInstance;
use crate::prox::Quadratic;
use crate::solver::{MetricRule, Schedule, TwoBlockProblem};

pub fn build_quadratic(inst: &QuadraticInstance) -> Result<TwoBlockProblem> {
    let (p, qz, a, bm) = inst.matrices()?;
    TwoBlockProblem::new(
        Arc::new(Quadratic::new(p, inst.q.clone())?),
        Arc::new(Quadratic::new(qz, inst.r.clone())?),
        Arc::new(DenseMap::from_matrix(a)?),
        Arc::new(DenseMap::from_matrix(bm)?),
        inst.b.clone(),
    )
}

/// Default stepsize `gamma / |A|^2`, the middle of the admissible window.
pub fn default_stepsize(problem: &TwoBlockProblem) -> f64 {
    problem.gamma() / (problem.a_norm() * problem.a_norm())
}

/// Metrics requested by the instance hints (`alpha` for `M1`, `sigma` for an
/// induced `M2`); zero otherwise.
pub fn hinted_metrics(inst: &QuadraticInstance) -> (MetricRule, MetricRule) {
    let m1 = match inst.alpha {
        Some(a) if a > 0.0 => MetricRule::ScaledIdentity(Schedule::Constant(a)),
        _ => MetricRule::Zero,
    };
    let m2 = match inst.sigma {
        Some(s) => MetricRule::Induced(Schedule::Constant(s)),
        None => MetricRule::Zero,
    };
    (m1, m2)
}
