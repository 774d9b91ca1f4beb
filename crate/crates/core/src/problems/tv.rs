//! Total-variation deblurring through its Fenchel dual.
//!
//! The primal problem `min 1/2 |Ax - b|^2 + lambda TV(x)` has the dual
//! `min f*(p) + g*(q)  s.t.  A^*p + L^*q = 0` with `f*(p) = 1/2 |p|^2 + <p, b>`
//! and `g*` the indicator of a box (anisotropic) or of pairwise balls
//! (isotropic). In two-block form the dual variables are `(x, z) = (p, q)`
//! and the multiplier is the restored image.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::metrics::isnr;
use crate::error::{check_dim, Error, Result};
use crate::linop::{
    fwd, make_discrete_gradient, make_gaussian_blur, AdjointMap, DiscreteGradient, GaussianBlur, ImageShape, LinearMap,
};
use crate::prox::{BoxIndicator, GroupL2Norm, L1Norm, PairwiseBallIndicator, ProxFn, ShiftedHalfSquare};
use crate::solver::run::Clock;
use crate::solver::{
    kkt_residuals, validate, IterRecord, IterateState, MetricRule, Monitor, Observation, RunRecord, Schedule,
    SolverConfig, Status, TwoBlockProblem,
};
use crate::vecops::norm_sq;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TvVariant {
    #[serde(alias = "aniso")]
    Anisotropic,
    #[serde(alias = "iso")]
    Isotropic,
}

impl TvVariant {
    pub fn short_name(&self) -> &'static str {
        match self {
            TvVariant::Anisotropic => "aniso",
            TvVariant::Isotropic => "iso",
        }
    }
}

impl std::str::FromStr for TvVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aniso" | "anisotropic" => Ok(TvVariant::Anisotropic),
            "iso" | "isotropic" => Ok(TvVariant::Isotropic),
            _ => Err(Error::Argument(format!("unknown TV variant '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlurSettings {
    pub size: usize,
    pub std: f64,
}

impl Default for BlurSettings {
    fn default() -> Self {
        Self { size: 9, std: 4.0 }
    }
}

/// Default stepsize: just below the window limit `2 gamma / |A|^2 = 2`.
pub const TV_STEPSIZE: f64 = 2.0 - 1e-7;
/// Window margin compatible with [`TV_STEPSIZE`].
pub const TV_EPSILON: f64 = 1e-8;

/// `sigma = 1 / (8.00001 c)`, so that `sigma c |L|^2 < 1`.
pub fn tv_default_sigma(c: f64) -> f64 {
    1.0 / (8.00001 * c)
}

#[derive(Clone)]
pub struct TvDualInstance {
    pub shape: ImageShape,
    /// Blurred, noisy observation `b`.
    pub observed: Vec<f64>,
    pub blur: Arc<GaussianBlur>,
    pub gradient: Arc<DiscreteGradient>,
    pub lambda: f64,
    pub variant: TvVariant,
    pub problem: TwoBlockProblem,
}

impl std::fmt::Debug for TvDualInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TvDualInstance")
            .field("shape", &self.shape)
            .field("lambda", &self.lambda)
            .field("variant", &self.variant)
            .finish()
    }
}

pub fn build_tv_dual(
    observed: Vec<f64>,
    shape: ImageShape,
    lambda: f64,
    variant: TvVariant,
    blur: BlurSettings,
) -> Result<TvDualInstance> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Argument(format!("lambda must be positive, got {lambda}")));
    }
    check_dim("observed image", shape.len(), observed.len())?;
    let n = shape.len();
    let blur_op = Arc::new(make_gaussian_blur(shape, blur.size, blur.std)?);
    let grad_op = Arc::new(make_discrete_gradient(shape));
    let g: Arc<dyn ProxFn> = match variant {
        TvVariant::Anisotropic => Arc::new(BoxIndicator::symmetric(2 * n, lambda)),
        TvVariant::Isotropic => Arc::new(PairwiseBallIndicator {
            pairs: n,
            radius: lambda,
        }),
    };
    let problem = TwoBlockProblem::new(
        Arc::new(ShiftedHalfSquare::new(observed.clone())),
        g,
        Arc::new(AdjointMap::new(blur_op.clone())),
        Arc::new(AdjointMap::new(grad_op.clone())),
        vec![0.0; n],
    )?;
    Ok(TvDualInstance {
        shape,
        observed,
        blur: blur_op,
        gradient: grad_op,
        lambda,
        variant,
        problem,
    })
}

impl TvDualInstance {
    /// `TV(x)` for the instance's variant, without the factor `lambda`.
    pub fn total_variation(&self, x: &[f64]) -> f64 {
        let lx = fwd(self.gradient.as_ref(), x);
        let n = self.shape.len();
        match self.variant {
            TvVariant::Anisotropic => L1Norm {
                dim: 2 * n,
                weight: 1.0,
            }
            .value(&lx),
            TvVariant::Isotropic => GroupL2Norm { pairs: n, weight: 1.0 }.value(&lx),
        }
    }

    /// `1/2 |Ax - b|^2 + lambda TV(x)`.
    pub fn primal_objective(&self, x: &[f64]) -> f64 {
        let ax = fwd(self.blur.as_ref(), x);
        let r: Vec<f64> = ax.iter().zip(&self.observed).map(|(u, v)| u - v).collect();
        0.5 * norm_sq(&r) + self.lambda * self.total_variation(x)
    }

    /// Starting point: zero duals and the observation as the image. Starting
    /// from the observation matters: the mean of the image error is only
    /// damped by `|1 - c|`, which is close to 1 for the default stepsize.
    pub fn initial_state(&self) -> IterateState {
        IterateState::new(
            vec![0.0; self.shape.len()],
            vec![0.0; 2 * self.shape.len()],
            self.observed.clone(),
        )
    }

    pub fn solver_config(&self, c: f64, max_iter: usize) -> SolverConfig {
        SolverConfig::new(c)
            .with_epsilon(TV_EPSILON)
            .with_max_iter(max_iter)
            .with_tol(0.0)
    }
}

/// Records the primal objective and, when the clean image is known, ISNR.
pub struct TvMonitor {
    observed: Vec<f64>,
    original: Option<Vec<f64>>,
    inst: TvDualInstance,
}

impl TvMonitor {
    pub fn new(inst: &TvDualInstance, original: Option<Vec<f64>>) -> Self {
        Self {
            observed: inst.observed.clone(),
            original,
            inst: inst.clone(),
        }
    }
}

impl Monitor for TvMonitor {
    fn observe(&mut self, obs: &Observation<'_>, out: &mut BTreeMap<String, f64>) -> Result<()> {
        let image = &obs.state.p;
        out.insert("objective_primal".into(), self.inst.primal_objective(image));
        if let Some(orig) = &self.original {
            out.insert("isnr_db".into(), isnr(orig, &self.observed, image)?);
        }
        Ok(())
    }
}

/// Runs the explicit dual scheme
///
/// ```text
/// p <- A x - b
/// q <- P(q + sigma c L(-A^*p - L^*q) + sigma L x)
/// x <- x + c(-A^*p - L^*q)
/// ```
///
/// starting from [`TvDualInstance::initial_state`]. The trace has the same
/// layout as [`crate::solver::solve`] with `M1 = 0` and the induced `M2`.
pub fn run_tv_scheme(
    inst: &TvDualInstance,
    config: &SolverConfig,
    sigma: f64,
    mut monitor: impl Monitor,
) -> Result<RunRecord> {
    let m1 = MetricRule::Zero;
    let m2 = MetricRule::Induced(Schedule::Constant(sigma));
    let report = validate(&inst.problem, config, &m1, &m2)?;
    let n = inst.shape.len();
    let blur = inst.blur.as_ref();
    let grad = inst.gradient.as_ref();
    let g = inst.problem.g.as_ref();

    let clock = Clock::start();
    let mut state = inst.initial_state();
    let mut prev: Option<IterateState> = None;
    let mut rows = Vec::new();
    let mut status = Status::MaxIter;
    let mut ap = vec![0.0; n];
    let mut lq = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut lr = vec![0.0; 2 * n];
    let mut lx = vec![0.0; 2 * n];
    let mut v = vec![0.0; 2 * n];
    loop {
        let kkt = kkt_residuals(&inst.problem, &state);
        let mut metrics = BTreeMap::new();
        monitor.observe(
            &Observation {
                problem: &inst.problem,
                state: &state,
                prev: prev.as_ref(),
                config,
                m1: &m1,
                m2: &m2,
            },
            &mut metrics,
        )?;
        rows.push(IterRecord {
            k: state.k,
            objective: inst.problem.objective(&state.x, &state.z),
            feasibility: kkt.r_feas,
            r_f: kkt.r_f,
            r_g: kkt.r_g,
            elapsed: clock.elapsed(),
            inner_iterations: 0,
            metrics,
        });
        if kkt.max() <= config.feasibility_tol {
            status = Status::Converged;
            break;
        }
        if rows.len() > config.max_iter {
            break;
        }
        let c = config.stepsize.at(state.k);
        let s = sigma;
        let (x_img, q) = (&state.p, &state.z);
        // p^{k+1} = A x^k - b
        let mut p = fwd(blur, x_img);
        for (pi, bi) in p.iter_mut().zip(&inst.observed) {
            *pi -= bi;
        }
        // q^{k+1}
        blur.adjoint_into(&p, &mut ap);
        grad.adjoint_into(q, &mut lq);
        for i in 0..n {
            r[i] = -(lq[i] + ap[i]);
        }
        grad.apply_into(&r, &mut lr);
        grad.apply_into(x_img, &mut lx);
        for i in 0..2 * n {
            v[i] = q[i] + s * (lx[i] + c * lr[i]);
        }
        let mut q_new = vec![0.0; 2 * n];
        g.prox_into(s, &v, &mut q_new);
        // x^{k+1}
        grad.adjoint_into(&q_new, &mut lq);
        let mut x_new = x_img.clone();
        for i in 0..n {
            x_new[i] += c * (0.0 - ap[i] - lq[i]);
        }
        if !x_new.iter().chain(&q_new).all(|v| v.is_finite()) {
            return Err(Error::Numerical {
                iter: state.k + 1,
                what: "TV iterate".into(),
            });
        }
        let next = IterateState {
            x: p,
            z: q_new,
            p: x_new,
            k: state.k + 1,
        };
        prev = Some(std::mem::replace(&mut state, next));
    }
    Ok(RunRecord {
        algorithm: crate::solver::Algorithm::ProximalAma,
        rows,
        status,
        final_state: state,
        seed: config.seed,
        z_nonunique: report.z_step_unique == Some(false),
        warnings: report.warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::synthetic::{degrade, shapes_image};
    use crate::solver::{solve, Algorithm, NoMonitor};

    fn small(variant: TvVariant) -> TvDualInstance {
        let shape = ImageShape::new(16, 16).unwrap();
        let orig = shapes_image(shape, 1);
        let blur = make_gaussian_blur(shape, 5, 2.0).unwrap();
        let b = degrade(&orig, &blur, 1e-3, 2).unwrap();
        build_tv_dual(b, shape, 5e-3, variant, BlurSettings { size: 5, std: 2.0 }).unwrap()
    }

    #[test]
    fn rejects_nonpositive_lambda() {
        let shape = ImageShape::new(4, 4).unwrap();
        let r = build_tv_dual(
            vec![0.0; 16],
            shape,
            0.0,
            TvVariant::Anisotropic,
            BlurSettings { size: 3, std: 1.0 },
        );
        assert!(matches!(r, Err(Error::Argument(_))));
    }

    #[test]
    fn dual_structure() {
        let inst = small(TvVariant::Anisotropic);
        assert_eq!(inst.problem.gamma(), 1.0);
        assert!(inst.problem.rhs.iter().all(|v| *v == 0.0));
        // f*(p) - <w, p> is minimized at w - b
        let w: Vec<f64> = (0..256).map(|i| (i as f64).sin()).collect();
        let p = inst.problem.f.argmin_linear(&w).unwrap();
        for i in 0..256 {
            assert!((p[i] - (w[i] - inst.observed[i])).abs() < 1e-15);
        }
        let q = inst.problem.g.prox(1.0, &vec![1.0; 512]).unwrap();
        assert!(q.iter().all(|v| *v == inst.lambda));
    }

    #[test]
    fn first_iterate_is_residual_of_observation() {
        let inst = small(TvVariant::Isotropic);
        let c = TV_STEPSIZE;
        let cfg = inst.solver_config(c, 1);
        let rec = run_tv_scheme(&inst, &cfg, tv_default_sigma(c), NoMonitor).unwrap();
        let x0 = inst.observed.clone();
        let expected: Vec<f64> = fwd(inst.blur.as_ref(), &x0)
            .iter()
            .zip(&inst.observed)
            .map(|(u, v)| u - v)
            .collect();
        assert_eq!(rec.final_state.k, 1);
        assert_eq!(rec.final_state.x, expected);
    }

    #[test]
    fn scheme_matches_generic_solver() {
        for variant in [TvVariant::Anisotropic, TvVariant::Isotropic] {
            let inst = small(variant);
            let c = TV_STEPSIZE;
            let sigma = tv_default_sigma(c);
            let cfg = inst.solver_config(c, 40);
            let a = run_tv_scheme(&inst, &cfg, sigma, NoMonitor).unwrap();
            let b = solve(
                &inst.problem,
                &cfg,
                &MetricRule::Zero,
                &MetricRule::Induced(Schedule::Constant(sigma)),
                Algorithm::ProximalAma,
                inst.initial_state(),
                NoMonitor,
            )
            .unwrap();
            assert_eq!(a.rows.len(), b.rows.len());
            let sa = &a.final_state;
            let sb = &b.final_state;
            let d = sa.distance(&sb.x, &sb.z, &sb.p);
            assert!(d <= 1e-12, "{variant:?}: {d}");
        }
    }

    #[test]
    fn zero_image_stays_zero() {
        let shape = ImageShape::new(8, 8).unwrap();
        let inst = build_tv_dual(
            vec![0.0; 64],
            shape,
            1e-3,
            TvVariant::Anisotropic,
            BlurSettings { size: 3, std: 1.0 },
        )
        .unwrap();
        let cfg = inst.solver_config(TV_STEPSIZE, 10).with_tol(1e-14);
        let rec = run_tv_scheme(&inst, &cfg, tv_default_sigma(TV_STEPSIZE), NoMonitor).unwrap();
        assert_eq!(rec.status, Status::Converged);
        assert!(rec.final_state.p.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn oversized_sigma_is_a_config_error() {
        let inst = small(TvVariant::Anisotropic);
        let cfg = inst.solver_config(TV_STEPSIZE, 5);
        let r = run_tv_scheme(&inst, &cfg, 1.0 / (7.0 * TV_STEPSIZE), NoMonitor);
        assert!(matches!(r, Err(Error::InvalidConfig(_))));
    }
}
