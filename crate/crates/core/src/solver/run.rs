use std::collections::BTreeMap;

use serde::Serialize;

use super::config::SolverConfig;
use super::kkt::{kkt_residuals, KktResiduals};
use super::lyapunov::{lyapunov_diagnostics, LyapunovTerms, SaddlePoint};
use super::metric::MetricRule;
use super::problem::{IterateState, TwoBlockProblem};
use super::step::{ama_step_stats, proximal_ama_step_stats, StepStats};
use super::validate::{validate, ValidationReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Algorithm {
    Ama,
    ProximalAma,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Ama => "ama",
            Algorithm::ProximalAma => "prox-ama",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Status {
    Converged,
    MaxIter,
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterRecord {
    pub k: usize,
    /// `f(x) + h1(x) + g(z) + h2(z)`.
    pub objective: f64,
    pub feasibility: f64,
    pub r_f: f64,
    pub r_g: f64,
    /// Seconds since the solve started (0 where no clock is available).
    pub elapsed: f64,
    pub inner_iterations: usize,
    /// Values reported by the monitor, e.g. ISNR or Lyapunov terms.
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub rows: Vec<IterRecord>,
    pub status: Status,
    #[serde(skip)]
    pub final_state: IterateState,
    pub seed: u64,
    /// The z-subproblem was not certified to have a unique minimizer; the
    /// iterates then follow FISTA's limit point.
    pub z_nonunique: bool,
    pub warnings: Vec<String>,
}

impl RunRecord {
    pub fn last(&self) -> Option<&IterRecord> {
        self.rows.last()
    }

    pub fn iterations(&self) -> usize {
        self.final_state.k
    }

    pub fn metric(&self, name: &str) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.metrics.get(name).copied().unwrap_or(f64::NAN))
            .collect()
    }
}

/// What a [`Monitor`] sees after every iteration (and once at `k = 0`).
pub struct Observation<'a> {
    pub problem: &'a TwoBlockProblem,
    pub state: &'a IterateState,
    /// Previous iterate, `None` at `k = 0`.
    pub prev: Option<&'a IterateState>,
    pub config: &'a SolverConfig,
    pub m1: &'a MetricRule,
    pub m2: &'a MetricRule,
}

/// Synchronous per-iteration callback attaching task metrics to the trace.
pub trait Monitor {
    fn observe(&mut self, obs: &Observation<'_>, out: &mut BTreeMap<String, f64>) -> Result<()>;
}

pub struct NoMonitor;

impl Monitor for NoMonitor {
    fn observe(&mut self, _: &Observation<'_>, _: &mut BTreeMap<String, f64>) -> Result<()> {
        Ok(())
    }
}

impl<A: Monitor, B: Monitor> Monitor for (A, B) {
    fn observe(&mut self, obs: &Observation<'_>, out: &mut BTreeMap<String, f64>) -> Result<()> {
        self.0.observe(obs, out)?;
        self.1.observe(obs, out)
    }
}

impl<M: Monitor + ?Sized> Monitor for &mut M {
    fn observe(&mut self, obs: &Observation<'_>, out: &mut BTreeMap<String, f64>) -> Result<()> {
        (**self).observe(obs, out)
    }
}

/// Tracks `V_k` and `R_k` against a known saddle point.
pub struct LyapunovMonitor {
    pub saddle: SaddlePoint,
    pub terms: Vec<LyapunovTerms>,
}

impl LyapunovMonitor {
    pub fn new(saddle: SaddlePoint) -> Self {
        Self {
            saddle,
            terms: Vec::new(),
        }
    }
}

impl Monitor for LyapunovMonitor {
    fn observe(&mut self, obs: &Observation<'_>, out: &mut BTreeMap<String, f64>) -> Result<()> {
        let Some(prev) = obs.prev else {
            let s = obs.state;
            let c = obs.config.stepsize.at(s.k);
            let t = lyapunov_diagnostics(obs.problem, s, s, &self.saddle, c, c, obs.m1, obs.m2)?;
            out.insert("lyapunov_v".into(), t.v_k);
            return Ok(());
        };
        let t = lyapunov_diagnostics(
            obs.problem,
            prev,
            obs.state,
            &self.saddle,
            obs.config.stepsize.at(prev.k),
            obs.config.stepsize.at(obs.state.k),
            obs.m1,
            obs.m2,
        )?;
        out.insert("lyapunov_v".into(), t.v_next);
        out.insert("lyapunov_r_sum".into(), t.r_sum());
        self.terms.push(t);
        Ok(())
    }
}

#[cfg(not(target_arch = "wasm32"))]
pub(crate) struct Clock(std::time::Instant);

#[cfg(not(target_arch = "wasm32"))]
impl Clock {
    pub(crate) fn start() -> Self {
        Clock(std::time::Instant::now())
    }
    pub(crate) fn elapsed(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

// std::time::Instant panics on wasm32-unknown-unknown
#[cfg(target_arch = "wasm32")]
pub(crate) struct Clock;

#[cfg(target_arch = "wasm32")]
impl Clock {
    pub(crate) fn start() -> Self {
        Clock
    }
    pub(crate) fn elapsed(&self) -> f64 {
        0.0
    }
}

fn row(
    problem: &TwoBlockProblem,
    state: &IterateState,
    kkt: &KktResiduals,
    stats: StepStats,
    elapsed: f64,
    metrics: BTreeMap<String, f64>,
) -> IterRecord {
    IterRecord {
        k: state.k,
        objective: problem.objective(&state.x, &state.z),
        feasibility: kkt.r_feas,
        r_f: kkt.r_f,
        r_g: kkt.r_g,
        elapsed,
        inner_iterations: stats.inner_iterations,
        metrics,
    }
}

/// Validates the configuration, then iterates until every KKT residual is at
/// most `config.feasibility_tol` or `config.max_iter` iterations have run.
///
/// For [`Algorithm::Ama`] the metrics must be zero. Hard violations of the
/// convergence conditions give a record with [`Status::InvalidConfig`] and no
/// rows; a non-finite iterate aborts with [`Error::Numerical`].
pub fn solve(
    problem: &TwoBlockProblem,
    config: &SolverConfig,
    m1: &MetricRule,
    m2: &MetricRule,
    algorithm: Algorithm,
    init: IterateState,
    mut monitor: impl Monitor,
) -> Result<RunRecord> {
    init.check_dims(problem)?;
    let mut record = RunRecord {
        algorithm,
        rows: Vec::new(),
        status: Status::MaxIter,
        final_state: init.clone(),
        seed: config.seed,
        z_nonunique: false,
        warnings: Vec::new(),
    };
    if algorithm == Algorithm::Ama && (!m1.is_zero() || !m2.is_zero()) {
        record.status = Status::InvalidConfig("AMA uses zero metrics".into());
        return Ok(record);
    }
    let report: ValidationReport = match validate(problem, config, m1, m2) {
        Ok(r) => r,
        Err(Error::InvalidConfig(msg)) => {
            record.status = Status::InvalidConfig(msg);
            return Ok(record);
        }
        Err(e) => return Err(e),
    };
    record.z_nonunique = report.z_step_unique == Some(false);
    record.warnings = report.warnings;
    if !init.is_finite() {
        return Err(Error::Numerical {
            iter: init.k,
            what: "initial point".into(),
        });
    }

    let clock = Clock::start();
    let mut state = init;
    let mut prev: Option<IterateState> = None;
    let mut stats = StepStats::default();
    loop {
        let kkt = kkt_residuals(problem, &state);
        let mut metrics = BTreeMap::new();
        monitor.observe(
            &Observation {
                problem,
                state: &state,
                prev: prev.as_ref(),
                config,
                m1,
                m2,
            },
            &mut metrics,
        )?;
        record
            .rows
            .push(row(problem, &state, &kkt, stats, clock.elapsed(), metrics));
        if kkt.max() <= config.feasibility_tol {
            record.status = Status::Converged;
            break;
        }
        if record.rows.len() > config.max_iter {
            record.status = Status::MaxIter;
            break;
        }
        let c = config.stepsize.at(state.k);
        let (next, s) = match algorithm {
            Algorithm::Ama => ama_step_stats(problem, &state, c, &config.inner)?,
            Algorithm::ProximalAma => proximal_ama_step_stats(problem, &state, c, m1, m2, &config.inner)?,
        };
        stats = s;
        prev = Some(std::mem::replace(&mut state, next));
    }
    record.final_state = state;
    Ok(record)
}
