use std::path::Path;
use std::process::ExitCode;

use serde_json::json;

use proxama::problems::{build_svm, gaussian_blobs, BlobSettings, SvmMonitor};
use proxama::solver::{Algorithm, RunRecord, Status};

use crate::args::{Preset, SvmArgs};
use crate::config::resolve_seed;
use crate::error::{CliError, CliResult};
use crate::io::{read_labeled, write_labeled};
use crate::plot::{line_chart, Series};
use crate::trace::{ensure_dir, write_json, write_timing, write_trace, ObjectiveKind};
use crate::tv::require;

/// RMSE level used for the iteration-count comparison.
const RMSE_TARGET: f64 = 1e-3;

struct Params {
    weight: f64,
    sigma: f64,
    tau: f64,
}

fn params(args: &SvmArgs) -> Params {
    let (sigma, tau) = match args.preset {
        Some(Preset::Table1) => (0.2, 10.0),
        Some(Preset::Table2) => (0.25, 102.0),
        None => (0.2, 10.0),
    };
    Params {
        weight: args.weight.unwrap_or(1.0),
        sigma: args.sigma.unwrap_or(sigma),
        tau: args.tau.unwrap_or(tau),
    }
}

fn write_model(path: &Path, rec: &RunRecord, p: &Params, data_ref: &str) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    let mut put = |k: String, v: String| w.write_record([k, v]).map_err(|e| CliError::io(path, e));
    put("key".into(), "value".into())?;
    put("kernel_sigma".into(), p.sigma.to_string())?;
    put("C".into(), p.weight.to_string())?;
    put("training_data".into(), data_ref.to_string())?;
    for (i, v) in rec.final_state.x.iter().enumerate() {
        put(format!("coef_{i}"), v.to_string())?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn run(args: SvmArgs) -> CliResult<ExitCode> {
    let seed = resolve_seed(args.seed)?;
    let p = params(&args);
    require(p.weight > 0.0 && p.weight.is_finite(), "--C must be positive")?;
    require(p.sigma > 0.0 && p.sigma.is_finite(), "--sigma must be positive")?;
    require(p.tau >= 0.0 && p.tau.is_finite(), "--tau must be nonnegative")?;
    require(args.iters >= 1, "--iters must be at least 1")?;
    require(args.tol >= 0.0, "--tol must be nonnegative")?;
    if let Some(c) = args.stepsize {
        require(c > 0.0 && c.is_finite(), "--stepsize must be positive")?;
    }
    ensure_dir(&args.out)?;

    let (train_x, train_y, test, data_ref) = match (&args.data, args.synthetic) {
        (Some(_), true) => return Err(CliError::Config("use either --data or --synthetic".into())),
        (None, false) => return Err(CliError::Config("--data or --synthetic is required".into())),
        (Some(path), false) => {
            let (x, y) = read_labeled(path)?;
            let test = args.test_data.as_deref().map(read_labeled).transpose()?;
            (x, y, test, path.display().to_string())
        }
        (None, true) => {
            require(args.train_size >= 2, "--train-size must be at least 2")?;
            let settings = BlobSettings {
                train: args.train_size,
                test: args.test_size,
                ..BlobSettings::default()
            };
            let (train, test) = gaussian_blobs(&settings, seed)?;
            let train_path = args.out.join("train.csv");
            write_labeled(&train_path, &train.features, &train.labels)?;
            write_labeled(&args.out.join("test.csv"), &test.features, &test.labels)?;
            let test = (!test.is_empty()).then_some((test.features, test.labels));
            (train.features, train.labels, test, train_path.display().to_string())
        }
    };
    if let Some((tx, _)) = &test {
        if tx.first().map(|r| r.len()) != train_x.first().map(|r| r.len()) {
            return Err(CliError::Data("test data has a different number of features".into()));
        }
    }

    let inst = build_svm(train_x, train_y, p.weight, p.sigma)?;
    let c = match args.stepsize {
        Some(c) => c,
        None => inst.recommended_stepsize()?,
    };
    println!(
        "n = {}, lambda_min(K) = {:.4e}, lambda_max(K) = {:.4e}, c = {:.4e}",
        inst.labels.len(),
        inst.lambda_min,
        inst.lambda_max,
        c
    );
    let reference = inst.reference_solution(c, p.tau, args.reference_iters)?;
    let config = inst.config(c, args.iters, args.tol);
    let test_ref = test.as_ref().map(|(x, y)| (x.as_slice(), y.as_slice()));

    let algorithms = args.algo.algorithms();
    let records: Vec<CliResult<RunRecord>> = std::thread::scope(|s| {
        let handles: Vec<_> = algorithms
            .iter()
            .map(|&alg| {
                let (inst, reference, config, tau) = (&inst, &reference, &config, p.tau);
                s.spawn(move || -> CliResult<RunRecord> {
                    let mon = SvmMonitor::new(inst, Some(reference.clone()), test_ref)?;
                    Ok(inst.run(alg, tau, config, mon)?)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });

    let mut summary = Vec::new();
    let mut done = Vec::new();
    for (alg, rec) in algorithms.iter().zip(records) {
        let rec = rec?;
        if let Status::InvalidConfig(msg) = &rec.status {
            return Err(CliError::Config(msg.clone()));
        }
        let name = alg.name();
        write_trace(&args.out.join(format!("trace_{name}.csv")), &rec, ObjectiveKind::Primal)?;
        write_timing(&args.out.join(format!("timing_{name}.csv")), &rec)?;
        write_model(&args.out.join(format!("model_{name}.csv")), &rec, &p, &data_ref)?;
        let hit = rec.metric("rmse").iter().position(|v| *v <= RMSE_TARGET);
        let misclass = rec.last().and_then(|r| r.metrics.get("misclass_pct").copied());
        println!(
            "{:<9} iterations {:>6}  RMSE <= {RMSE_TARGET:e} at {}  test misclassification {}",
            name,
            rec.iterations(),
            hit.map_or("never".to_string(), |k| format!("k = {k}")),
            misclass.map_or("n/a".to_string(), |m| format!("{m:.2}%"))
        );
        summary.push(json!({
            "algorithm": name,
            "tau": if *alg == Algorithm::Ama { 0.0 } else { p.tau },
            "status": format!("{:?}", rec.status),
            "iterations": rec.iterations(),
            "rmse_target_iteration": hit,
            "misclass_pct": misclass,
            "elapsed_s": rec.last().map(|r| r.elapsed),
            "warnings": rec.warnings,
        }));
        done.push((*alg, rec));
    }
    if args.plot {
        let series = |key: &str| -> Vec<Series<'_>> {
            done.iter()
                .map(|(alg, rec)| Series {
                    name: alg.name(),
                    points: rec
                        .rows
                        .iter()
                        .zip(rec.metric(key))
                        .map(|(r, v)| (r.k as f64, v))
                        .collect(),
                })
                .collect()
        };
        let charts = [
            (
                "rmse.svg",
                line_chart(
                    "Kernel SVM, distance to reference",
                    "iteration",
                    "RMSE",
                    &series("rmse"),
                    true,
                ),
            ),
            (
                "misclass.svg",
                line_chart(
                    "Kernel SVM, test error",
                    "iteration",
                    "misclassified (%)",
                    &series("misclass_pct"),
                    false,
                ),
            ),
        ];
        for (name, svg) in charts {
            let path = args.out.join(name);
            std::fs::write(&path, svg).map_err(|e| CliError::io(&path, e))?;
        }
    }
    write_json(
        &args.out.join("run.json"),
        &json!({
            "command": "svm",
            "seed": seed,
            "stepsize": c,
            "C": p.weight,
            "sigma": p.sigma,
            "tau": p.tau,
            "args": args,
            "runs": summary,
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}
