//! AMA and Proximal AMA for
//! `min f(x) + h1(x) + g(z) + h2(z)  s.t.  Ax + Bz = b`.

mod config;
mod fista;
mod kkt;
mod lyapunov;
mod metric;
mod problem;
pub(crate) mod run;
mod step;
mod validate;

pub use config::{InnerSettings, Schedule, SolverConfig};
pub use fista::{fista, FistaOutcome};
pub use kkt::{kkt_residuals, KktResiduals};
pub use lyapunov::{lyapunov_diagnostics, LyapunovTerms, SaddlePoint};
pub use metric::{MetricHook, MetricRule, Subproblem};
pub use problem::{IterateState, TwoBlockProblem};
pub use run::{solve, Algorithm, IterRecord, LyapunovMonitor, Monitor, NoMonitor, Observation, RunRecord, Status};
pub use step::{ama_step, proximal_ama_step, StepStats};
pub use validate::{validate, AssumptionStatus, ValidationReport, INJECTIVITY_CHECK_LIMIT};
