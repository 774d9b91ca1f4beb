//! Trace CSVs. Every trace shares one header; columns a run does not produce
//! stay empty. Wall-clock times go to a separate `timing_*.csv` so repeated
//! runs give byte-identical traces.

use std::path::Path;

use proxama::solver::RunRecord;

use crate::error::{CliError, CliResult};

pub const TRACE_HEADER: [&str; 11] = [
    "iter",
    "objective_primal",
    "objective_dual",
    "feasibility",
    "kkt_f",
    "kkt_g",
    "isnr_db",
    "rmse",
    "misclass_pct",
    "lyapunov_v",
    "lyapunov_r_sum",
];

/// Where the run's recorded objective goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    Primal,
    /// The solver works on a dual problem; the primal value comes from the
    /// monitor's `objective_primal` metric.
    Dual,
}

fn cell(v: Option<f64>) -> String {
    v.filter(|x| !x.is_nan()).map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_trace(path: &Path, rec: &RunRecord, kind: ObjectiveKind) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    w.write_record(TRACE_HEADER).map_err(|e| CliError::io(path, e))?;
    for row in &rec.rows {
        let m = |k: &str| row.metrics.get(k).copied();
        let (primal, dual) = match kind {
            ObjectiveKind::Primal => (Some(row.objective), None),
            ObjectiveKind::Dual => (m("objective_primal"), Some(row.objective)),
        };
        let fields = [
            row.k.to_string(),
            cell(primal),
            cell(dual),
            cell(Some(row.feasibility)),
            cell(Some(row.r_f)),
            cell(Some(row.r_g)),
            cell(m("isnr_db")),
            cell(m("rmse")),
            cell(m("misclass_pct")),
            cell(m("lyapunov_v")),
            cell(m("lyapunov_r_sum")),
        ];
        w.write_record(&fields).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_timing(path: &Path, rec: &RunRecord) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    w.write_record(["iter", "elapsed_s", "inner_iterations"])
        .map_err(|e| CliError::io(path, e))?;
    for row in &rec.rows {
        w.write_record([
            row.k.to_string(),
            row.elapsed.to_string(),
            row.inner_iterations.to_string(),
        ])
        .map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}
