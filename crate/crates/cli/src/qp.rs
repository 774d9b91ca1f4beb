use std::process::ExitCode;

use serde_json::json;

use proxama::oracle::{quadratic_saddle, QuadraticInstance};
use proxama::problems::{build_quadratic, default_stepsize, hinted_metrics};
use proxama::solver::{
    kkt_residuals, solve, Algorithm, IterateState, LyapunovMonitor, MetricRule, NoMonitor, SolverConfig, Status,
};

use crate::args::QpArgs;
use crate::config::resolve_seed;
use crate::error::{CliError, CliResult};
use crate::plot::{line_chart, Series};
use crate::trace::{ensure_dir, write_json, write_timing, write_trace, ObjectiveKind};
use crate::tv::require;

pub fn run(args: QpArgs) -> CliResult<ExitCode> {
    let seed = resolve_seed(args.seed)?;
    require(args.iters >= 1, "--iters must be at least 1")?;
    require(args.tol >= 0.0, "--tol must be nonnegative")?;
    let text = std::fs::read_to_string(&args.problem).map_err(|e| CliError::io(&args.problem, e))?;
    let inst: QuadraticInstance =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", args.problem.display())))?;
    let problem = build_quadratic(&inst)?;
    let c = args.stepsize.or(inst.c).unwrap_or_else(|| default_stepsize(&problem));
    let config = SolverConfig::new(c)
        .with_max_iter(args.iters)
        .with_tol(args.tol)
        .with_seed(seed);
    let saddle = match quadratic_saddle(&inst) {
        Ok(s) => Some(s),
        Err(e) => {
            eprintln!("warning: no reference saddle point ({e}); Lyapunov columns stay empty");
            None
        }
    };
    ensure_dir(&args.out)?;

    let mut summary = Vec::new();
    let mut done = Vec::new();
    for alg in args.algo.algorithms() {
        let (m1, m2) = match alg {
            Algorithm::ProximalAma => hinted_metrics(&inst),
            Algorithm::Ama => (MetricRule::Zero, MetricRule::Zero),
        };
        let init = IterateState::zeros(&problem);
        let rec = match &saddle {
            Some(s) => solve(&problem, &config, &m1, &m2, alg, init, LyapunovMonitor::new(s.clone()))?,
            None => solve(&problem, &config, &m1, &m2, alg, init, NoMonitor)?,
        };
        if let Status::InvalidConfig(msg) = &rec.status {
            return Err(CliError::Config(msg.clone()));
        }
        let name = alg.name();
        write_trace(&args.out.join(format!("trace_{name}.csv")), &rec, ObjectiveKind::Primal)?;
        write_timing(&args.out.join(format!("timing_{name}.csv")), &rec)?;
        let kkt = kkt_residuals(&problem, &rec.final_state);
        let distance = saddle.as_ref().map(|s| rec.final_state.distance(&s.x, &s.z, &s.p));
        println!(
            "{:<9} {:?} after {} iterations  KKT max {:.3e}  distance to saddle {}",
            name,
            rec.status,
            rec.iterations(),
            kkt.max(),
            distance.map_or("n/a".to_string(), |d| format!("{d:.3e}"))
        );
        for w in &rec.warnings {
            eprintln!("warning: {w}");
        }
        summary.push(json!({
            "algorithm": name,
            "status": format!("{:?}", rec.status),
            "iterations": rec.iterations(),
            "kkt": [kkt.r_f, kkt.r_g, kkt.r_feas],
            "distance_to_saddle": distance,
            "x": rec.final_state.x,
            "z": rec.final_state.z,
            "p": rec.final_state.p,
            "warnings": rec.warnings,
        }));
        done.push((alg, rec));
    }
    if args.plot {
        let series: Vec<Series<'_>> = done
            .iter()
            .map(|(alg, rec)| Series {
                name: alg.name(),
                points: rec
                    .rows
                    .iter()
                    .map(|r| (r.k as f64, r.r_f.max(r.r_g).max(r.feasibility)))
                    .collect(),
            })
            .collect();
        let path = args.out.join("kkt.svg");
        std::fs::write(
            &path,
            line_chart("KKT residual", "iteration", "max residual", &series, true),
        )
        .map_err(|e| CliError::io(&path, e))?;
    }
    write_json(
        &args.out.join("run.json"),
        &json!({ "command": "qp", "seed": seed, "stepsize": c, "args": args, "runs": summary }),
    )?;
    Ok(ExitCode::SUCCESS)
}
