//! Admissibility checks for stepsizes and metrics.
//!
//! Hard constraints (stepsize window, monotone stepsizes, `M^k - (L/2) Id`
//! positive semidefinite, Loewner-monotone metrics) produce
//! [`Error::InvalidConfig`]. Whether the convergence assumptions on `M2` or
//! `B` hold is only reported.

use nalgebra::DMatrix;

use super::config::SolverConfig;
use super::metric::MetricRule;
use super::problem::TwoBlockProblem;
use crate::error::{Error, Result};
use crate::linop::estimate_norm;

/// Largest column count for which `B^* B >= beta Id` is checked densely.
pub const INJECTIVITY_CHECK_LIMIT: usize = 2048;

const PSD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum AssumptionStatus {
    /// `M2^k - (L2/2) Id >= alpha Id` for all `k`.
    MetricCoercive {
        alpha: f64,
    },
    /// `B^* B >= beta Id`.
    InjectiveB {
        beta: f64,
    },
    NeitherCertified,
    /// `B` could not be materialized and the metric gives no margin.
    NotChecked,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub gamma: f64,
    pub a_norm: f64,
    /// `2 gamma / |A|^2 - epsilon`.
    pub stepsize_upper: f64,
    pub assumption: AssumptionStatus,
    /// Whether the z-subproblem is certified strongly convex; `None` when unknown.
    pub z_step_unique: Option<bool>,
    pub warnings: Vec<String>,
}

fn invalid(msg: String) -> Error {
    Error::InvalidConfig(msg)
}

fn symmetric_min_eigenvalue(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(invalid(format!(
            "metric must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax().max(1.0);
    for i in 0..m.nrows() {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return Err(invalid(format!("metric is not symmetric at ({i},{j})")));
            }
        }
    }
    Ok(m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min))
}

/// Checks `M^k - (l/2) Id >= 0` and `M^k >= M^{k+1}`; returns
/// `inf_k lambda_min(M^k - (l/2) Id)` when it can be bounded.
fn check_metric(
    block: &str,
    rule: &MetricRule,
    l: f64,
    dim: usize,
    config: &SolverConfig,
    b_norm: f64,
    b_norm_est: f64,
    horizon: usize,
    warnings: &mut Vec<String>,
) -> Result<Option<f64>> {
    let c = |k: usize| config.stepsize.at(k);
    match rule {
        MetricRule::Zero => {
            if l > 0.0 {
                return Err(invalid(format!(
                    "{block}: zero metric requires L = 0, but M - (L/2) Id = -{}/2 Id is not PSD",
                    l
                )));
            }
            Ok(Some(0.0))
        }
        MetricRule::ScaledIdentity(s) => {
            let mut margin = f64::INFINITY;
            for k in 0..horizon {
                let a = s.at(k);
                if a - 0.5 * l < -PSD_TOL * a.abs().max(1.0) {
                    return Err(invalid(format!(
                        "{block}: alpha_k - L/2 >= 0 violated at k={k} (alpha_k = {a}, L = {l})"
                    )));
                }
                if s.at(k + 1) > a {
                    return Err(invalid(format!(
                        "{block}: metrics must be nonincreasing, alpha_{} = {} > alpha_{k} = {a}",
                        k + 1,
                        s.at(k + 1)
                    )));
                }
                margin = margin.min(a - 0.5 * l);
            }
            Ok(Some(margin))
        }
        MetricRule::Induced(s) => {
            if block == "M1" {
                return Err(invalid("M1: the induced metric is defined for the z-block only".into()));
            }
            let mut margin = f64::INFINITY;
            for k in 0..horizon {
                let sigma = s.at(k);
                if !(sigma > 0.0) {
                    return Err(invalid(format!("{block}: sigma_k > 0 violated at k={k} ({sigma})")));
                }
                let prod = sigma * c(k) * b_norm * b_norm;
                if prod > 1.0 + 1e-12 {
                    return Err(invalid(format!(
                        "{block}: sigma_k c_k |B|^2 <= 1 violated at k={k} ({prod})"
                    )));
                }
                let lmin = 1.0 / sigma - c(k) * b_norm * b_norm;
                if lmin - 0.5 * l < -PSD_TOL * (1.0 / sigma) {
                    return Err(invalid(format!(
                        "{block}: (1/sigma_k) - c_k |B|^2 - L2/2 >= 0 violated at k={k} ({})",
                        lmin - 0.5 * l
                    )));
                }
                // M^k - M^{k+1} = (1/s_k - 1/s_{k+1}) Id - (c_k - c_{k+1}) B^*B
                let d_inv = 1.0 / sigma - 1.0 / s.at(k + 1);
                let d_c = c(k) - c(k + 1);
                if d_inv < d_c * b_norm_est * b_norm_est - 1e-12 * (1.0 / sigma) {
                    return Err(invalid(format!(
                        "{block}: induced metrics must be nonincreasing, violated at k={k}"
                    )));
                } else if d_inv < d_c * b_norm * b_norm - 1e-12 * (1.0 / sigma) {
                    warnings.push(format!("{block}: Loewner monotonicity at k={k} not certified"));
                }
                margin = margin.min(lmin - 0.5 * l);
            }
            Ok(Some(margin.max(0.0)))
        }
        MetricRule::Dense(ms) => {
            if ms.is_empty() {
                return Err(invalid(format!("{block}: dense metric list is empty")));
            }
            let mut margin = f64::INFINITY;
            for k in 0..horizon.min(ms.len()) {
                let m = &ms[k];
                if m.nrows() != dim {
                    return Err(invalid(format!(
                        "{block}: metric is {}x{}, block dimension is {dim}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                let shifted = m - DMatrix::identity(dim, dim) * (0.5 * l);
                let lmin = symmetric_min_eigenvalue(&shifted)?;
                if lmin < -PSD_TOL * m.amax().max(1.0) {
                    return Err(invalid(format!(
                        "{block}: M^k - (L/2) Id is not PSD at k={k} (lambda_min = {lmin})"
                    )));
                }
                margin = margin.min(lmin);
                if k + 1 < ms.len() {
                    let diff = m - &ms[k + 1];
                    let dmin = symmetric_min_eigenvalue(&diff)?;
                    if dmin < -PSD_TOL * m.amax().max(1.0) {
                        return Err(invalid(format!(
                            "{block}: M^k >= M^(k+1) violated at k={k} (lambda_min = {dmin})"
                        )));
                    }
                }
            }
            Ok(Some(margin.max(0.0)))
        }
        MetricRule::Custom(h) => {
            if h.nonincreasing() == Some(false) {
                return Err(invalid(format!("{block}: custom metric is not nonincreasing")));
            }
            if h.nonincreasing().is_none() {
                warnings.push(format!("{block}: monotonicity of the custom metric not checked"));
            }
            let mut margin = Some(f64::INFINITY);
            for k in 0..horizon {
                match h.min_eigenvalue(k) {
                    Some(lmin) => {
                        if lmin - 0.5 * l < -PSD_TOL * lmin.abs().max(1.0) {
                            return Err(invalid(format!(
                                "{block}: M^k - (L/2) Id is not PSD at k={k} (lambda_min = {lmin}, L = {l})"
                            )));
                        }
                        margin = margin.map(|m: f64| m.min(lmin - 0.5 * l));
                    }
                    None => margin = None,
                }
            }
            if margin.is_none() {
                warnings.push(format!(
                    "{block}: positive semidefiniteness of the custom metric not checked"
                ));
            }
            Ok(margin.map(|m| m.max(0.0)))
        }
    }
}

/// `B^* B >= beta Id`: returns `Some(beta)` (possibly 0) when `B` can be
/// materialized.
pub(crate) fn injectivity_margin(problem: &TwoBlockProblem) -> Option<f64> {
    if problem.z_dim() > INJECTIVITY_CHECK_LIMIT {
        return None;
    }
    let b = problem.b.to_dense()?;
    if b.nrows() < b.ncols() {
        return Some(0.0);
    }
    let smin = b.singular_values().iter().cloned().fold(f64::INFINITY, f64::min);
    Some(smin * smin)
}

pub fn validate(
    problem: &TwoBlockProblem,
    config: &SolverConfig,
    m1: &MetricRule,
    m2: &MetricRule,
) -> Result<ValidationReport> {
    let gamma = problem.gamma();
    let a_norm = problem.a_norm();
    let eps = config.epsilon;
    let mut warnings = Vec::new();

    if config.stepsize.is_empty() {
        return Err(invalid("stepsize schedule is empty".into()));
    }
    let cap = gamma / (a_norm * a_norm);
    if !(eps > 0.0 && eps < cap) {
        return Err(invalid(format!(
            "0 < epsilon < gamma/|A|^2 violated (epsilon = {eps}, gamma/|A|^2 = {cap})"
        )));
    }
    let upper = 2.0 * cap - eps;
    let horizon = config.stepsize.horizon().max(m1.horizon()).max(m2.horizon()) + 1;
    for k in 0..horizon {
        let c = config.stepsize.at(k);
        if !(c >= eps) {
            return Err(invalid(format!(
                "epsilon <= c_k violated at k={k} (c_k = {c}, epsilon = {eps})"
            )));
        }
        if c > upper {
            return Err(invalid(format!(
                "c_k <= 2*gamma/|A|^2 - epsilon violated at k={k} (c_k = {c}, bound = {upper})"
            )));
        }
        let next = config.stepsize.at(k + 1);
        if next > c {
            return Err(invalid(format!(
                "stepsizes must be nonincreasing: c_{} = {next} > c_{k} = {c}",
                k + 1
            )));
        }
    }

    if m1.is_zero() && problem.f.argmin_linear(&vec![0.0; problem.x_dim()]).is_none() {
        return Err(Error::Unsupported(
            "zero M1 needs a closed-form argmin of f(x) - <w, x>".into(),
        ));
    }

    if matches!(m1, MetricRule::Dense(_)) {
        return Err(Error::Unsupported(
            "a dense M1 needs a custom solve hook for the x-subproblem".into(),
        ));
    }

    let b_norm = problem.b_norm();
    // cheap lower estimate, used to prove violations rather than certify
    let b_norm_est = if matches!(m2, MetricRule::Induced(_)) {
        estimate_norm(problem.b.as_ref(), 100, 1e-8)
    } else {
        b_norm
    };
    check_metric(
        "M1",
        m1,
        problem.l1(),
        problem.x_dim(),
        config,
        problem.a_norm(),
        problem.a_norm(),
        horizon,
        &mut warnings,
    )?;
    let m2_margin = check_metric(
        "M2",
        m2,
        problem.l2(),
        problem.z_dim(),
        config,
        b_norm,
        b_norm_est,
        horizon,
        &mut warnings,
    )?;

    let beta = injectivity_margin(problem);
    let beta_tol = 1e-12 * (b_norm * b_norm).max(1.0);
    let assumption = match (m2_margin, beta) {
        (Some(alpha), _) if alpha > 0.0 => AssumptionStatus::MetricCoercive { alpha },
        (_, Some(beta)) if beta > beta_tol => AssumptionStatus::InjectiveB { beta },
        (_, Some(_)) => AssumptionStatus::NeitherCertified,
        (_, None) => AssumptionStatus::NotChecked,
    };
    match assumption {
        AssumptionStatus::NeitherCertified => warnings
            .push("neither M2 - (L2/2) Id >= alpha Id nor B^*B >= beta Id holds; convergence is not guaranteed".into()),
        AssumptionStatus::NotChecked => {
            warnings.push("convergence assumptions on M2 / B could not be certified".into())
        }
        _ => {}
    }

    // c_k B^*B + M2^k positive definite?
    let m2_floor = match m2 {
        MetricRule::Induced(_) => Some(f64::INFINITY),
        MetricRule::ScaledIdentity(_) | MetricRule::Dense(_) => m2_margin.map(|m| m + 0.5 * problem.l2()),
        MetricRule::Zero => Some(0.0),
        MetricRule::Custom(h) => h.min_eigenvalue(0),
    };
    let z_step_unique = match (m2_floor, beta) {
        (Some(f), _) if f > 0.0 => Some(true),
        (_, Some(beta)) => Some(beta > beta_tol),
        _ => None,
    };
    if z_step_unique == Some(false) {
        warnings.push("z-subproblem is not strongly convex; its minimizer may be non-unique".into());
    }

    Ok(ValidationReport {
        gamma,
        a_norm,
        stepsize_upper: upper,
        assumption,
        z_step_unique,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::{make_dense, LinearMap};
    use crate::prox::ShiftedHalfSquare;
    use crate::solver::config::Schedule;
    use std::sync::Arc;

    fn unit_problem() -> TwoBlockProblem {
        let a: Arc<dyn LinearMap> = Arc::new(make_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap());
        let b: Arc<dyn LinearMap> = Arc::new(make_dense(&[vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap());
        TwoBlockProblem::new(
            Arc::new(ShiftedHalfSquare::centered(2)),
            Arc::new(ShiftedHalfSquare::centered(2)),
            a,
            b,
            vec![1.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn unit_stepsize_is_valid() {
        let p = unit_problem();
        let cfg = SolverConfig::new(1.0).with_epsilon(0.1);
        let r = validate(&p, &cfg, &MetricRule::Zero, &MetricRule::Zero).unwrap();
        assert!((r.stepsize_upper - 1.9).abs() < 1e-12);
        assert!(matches!(r.assumption, AssumptionStatus::InjectiveB { .. }));
        assert_eq!(r.z_step_unique, Some(true));
    }

    #[test]
    fn oversized_stepsize_is_rejected() {
        let p = unit_problem();
        let cfg = SolverConfig::new(2.5).with_epsilon(0.1);
        let err = validate(&p, &cfg, &MetricRule::Zero, &MetricRule::Zero).unwrap_err();
        assert!(
            matches!(err, Error::InvalidConfig(ref m) if m.contains("2*gamma/|A|^2")),
            "{err}"
        );
    }

    #[test]
    fn increasing_stepsize_is_rejected() {
        let p = unit_problem();
        let cfg = SolverConfig::new(Schedule::Table(vec![0.5, 0.6])).with_epsilon(0.1);
        let err = validate(&p, &cfg, &MetricRule::Zero, &MetricRule::Zero).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(ref m) if m.contains("nonincreasing")));
    }

    #[test]
    fn epsilon_range() {
        let p = unit_problem();
        let cfg = SolverConfig::new(1.0).with_epsilon(1.5);
        assert!(validate(&p, &cfg, &MetricRule::Zero, &MetricRule::Zero).is_err());
    }

    #[test]
    fn induced_metric_bound() {
        let p = unit_problem();
        let cfg = SolverConfig::new(1.0).with_epsilon(0.1);
        let ok = validate(
            &p,
            &cfg,
            &MetricRule::Zero,
            &MetricRule::Induced(Schedule::Constant(0.5)),
        )
        .unwrap();
        assert!(matches!(ok.assumption, AssumptionStatus::MetricCoercive { alpha } if (alpha - 1.0).abs() < 1e-9));
        let err = validate(
            &p,
            &cfg,
            &MetricRule::Zero,
            &MetricRule::Induced(Schedule::Constant(1.5)),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(ref m) if m.contains("sigma_k c_k |B|^2 <= 1")));
        assert!(validate(
            &p,
            &cfg,
            &MetricRule::Induced(Schedule::Constant(0.5)),
            &MetricRule::Zero
        )
        .is_err());
    }

    #[test]
    fn dense_metric_checks() {
        let p = unit_problem();
        let cfg = SolverConfig::new(1.0).with_epsilon(0.1);
        let good = MetricRule::Dense(vec![DMatrix::identity(2, 2) * 2.0, DMatrix::identity(2, 2)]);
        assert!(validate(&p, &cfg, &MetricRule::Zero, &good).is_ok());
        let growing = MetricRule::Dense(vec![DMatrix::identity(2, 2), DMatrix::identity(2, 2) * 2.0]);
        assert!(validate(&p, &cfg, &MetricRule::Zero, &growing).is_err());
        let indefinite = MetricRule::Dense(vec![DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])]);
        assert!(validate(&p, &cfg, &MetricRule::Zero, &indefinite).is_err());
    }

    #[test]
    fn smooth_terms_need_metric_room() {
        let p = unit_problem()
            .with_h2(Arc::new(ShiftedHalfSquare::centered(2)))
            .unwrap();
        let cfg = SolverConfig::new(1.0).with_epsilon(0.1);
        assert!(validate(&p, &cfg, &MetricRule::Zero, &MetricRule::Zero).is_err());
        assert!(validate(
            &p,
            &cfg,
            &MetricRule::Zero,
            &MetricRule::ScaledIdentity(Schedule::Constant(0.5))
        )
        .is_ok());
        assert!(validate(
            &p,
            &cfg,
            &MetricRule::Zero,
            &MetricRule::ScaledIdentity(Schedule::Constant(0.4))
        )
        .is_err());
    }

    #[test]
    fn non_injective_b_without_metric_margin() {
        let a: Arc<dyn LinearMap> = Arc::new(make_dense(&[vec![1.0]]).unwrap());
        let b: Arc<dyn LinearMap> = Arc::new(make_dense(&[vec![1.0, 1.0]]).unwrap());
        let p = TwoBlockProblem::new(
            Arc::new(ShiftedHalfSquare::centered(1)),
            Arc::new(ShiftedHalfSquare::centered(2)),
            a,
            b,
            vec![0.0],
        )
        .unwrap();
        let cfg = SolverConfig::new(1.0).with_epsilon(0.1);
        let r = validate(&p, &cfg, &MetricRule::Zero, &MetricRule::Zero).unwrap();
        assert_eq!(r.assumption, AssumptionStatus::NeitherCertified);
        assert_eq!(r.z_step_unique, Some(false));
        assert!(!r.warnings.is_empty());
    }
}
