use serde::{Deserialize, Serialize};

/// A per-iteration positive parameter sequence. A table repeats its last
/// entry forever.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Schedule {
    Constant(f64),
    Table(Vec<f64>),
}

impl Schedule {
    pub fn at(&self, k: usize) -> f64 {
        match self {
            Schedule::Constant(v) => *v,
            Schedule::Table(t) => t[k.min(t.len() - 1)],
        }
    }

    /// Number of leading iterations after which the schedule is constant.
    pub fn horizon(&self) -> usize {
        match self {
            Schedule::Constant(_) => 1,
            Schedule::Table(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Schedule::Table(t) if t.is_empty())
    }
}

impl From<f64> for Schedule {
    fn from(v: f64) -> Self {
        Schedule::Constant(v)
    }
}

/// Settings of the inner FISTA loop used for subproblems without a closed
/// form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerSettings {
    pub max_iter: usize,
    /// Tolerance on the norm of the composite gradient mapping.
    pub tol: f64,
    /// Use the closed-form prox step for the induced metric. When false, the
    /// z-subproblem is always handed to FISTA.
    pub z_closed_form: bool,
}

impl Default for InnerSettings {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-8,
            z_closed_form: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stepsizes `c_k`; must be nonincreasing.
    pub stepsize: Schedule,
    /// Margin of the admissible stepsize window.
    pub epsilon: f64,
    pub max_iter: usize,
    /// Stop once every KKT residual is at most this value.
    pub feasibility_tol: f64,
    pub inner: InnerSettings,
    /// Recorded with the run; the solver itself draws no random numbers.
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(stepsize: impl Into<Schedule>) -> Self {
        Self {
            stepsize: stepsize.into(),
            epsilon: 1e-9,
            max_iter: 1000,
            feasibility_tol: 1e-8,
            inner: InnerSettings::default(),
            seed: 0,
        }
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.feasibility_tol = tol;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_inner(mut self, inner: InnerSettings) -> Self {
        self.inner = inner;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}
