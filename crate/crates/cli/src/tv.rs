use std::process::ExitCode;

use serde_json::json;

use proxama::linop::{make_gaussian_blur, ImageShape};
use proxama::problems::{
    build_tv_dual, degrade, run_tv_scheme, shapes_image, tv_default_sigma, BlurSettings, TvDualInstance, TvMonitor,
    TvVariant, TV_STEPSIZE,
};
use proxama::solver::{solve, Algorithm, MetricRule, RunRecord, Status};

use crate::args::{TvArgs, TvChoice};
use crate::config::resolve_seed;
use crate::error::{CliError, CliResult};
use crate::io::{read_image, write_pgm};
use crate::plot::{line_chart, Series};
use crate::trace::{ensure_dir, write_json, write_timing, write_trace, ObjectiveKind};

pub(crate) fn require(ok: bool, what: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(what.to_string()))
    }
}

fn run_one(inst: &TvDualInstance, original: &[f64], alg: Algorithm, args: &TvArgs) -> CliResult<RunRecord> {
    let c = args.stepsize.unwrap_or(TV_STEPSIZE);
    let sigma = args.sigma_metric.unwrap_or_else(|| tv_default_sigma(c));
    let config = inst.solver_config(c, args.iters).with_tol(args.tol);
    let monitor = TvMonitor::new(inst, Some(original.to_vec()));
    let rec = match alg {
        Algorithm::ProximalAma => run_tv_scheme(inst, &config, sigma, monitor)?,
        Algorithm::Ama => solve(
            &inst.problem,
            &config,
            &MetricRule::Zero,
            &MetricRule::Zero,
            Algorithm::Ama,
            inst.initial_state(),
            monitor,
        )?,
    };
    if let Status::InvalidConfig(msg) = &rec.status {
        return Err(CliError::Config(msg.clone()));
    }
    Ok(rec)
}

pub fn run(args: TvArgs) -> CliResult<ExitCode> {
    let seed = resolve_seed(args.seed)?;
    require(
        args.lambda > 0.0 && args.lambda.is_finite(),
        "--lambda must be positive",
    )?;
    require(
        args.noise >= 0.0 && args.noise.is_finite(),
        "--noise must be nonnegative",
    )?;
    require(args.iters >= 1, "--iters must be at least 1")?;
    require(args.tol >= 0.0, "--tol must be nonnegative")?;
    if let Some(c) = args.stepsize {
        require(c > 0.0 && c.is_finite(), "--stepsize must be positive")?;
    }
    if let Some(s) = args.sigma_metric {
        require(s > 0.0 && s.is_finite(), "--sigma-metric must be positive")?;
    }

    let (shape, original) = match (&args.input, args.synthetic) {
        (Some(_), true) => return Err(CliError::Config("use either --input or --synthetic".into())),
        (None, false) => return Err(CliError::Config("an --input image or --synthetic is required".into())),
        (Some(path), false) => {
            let img = read_image(path)?;
            (img.shape, img.data)
        }
        (None, true) => {
            require(args.size >= 2, "--size must be at least 2")?;
            let shape = ImageShape::new(args.size, args.size)?;
            (shape, shapes_image(shape, seed))
        }
    };
    let blur_settings = BlurSettings::default();
    let blur = make_gaussian_blur(shape, blur_settings.size, blur_settings.std)?;
    let observed = degrade(&original, &blur, args.noise, seed.wrapping_add(1))?;

    ensure_dir(&args.out)?;
    write_pgm(&args.out.join("original.pgm"), shape, &original)?;
    write_pgm(&args.out.join("observed.pgm"), shape, &observed)?;

    let variants = match args.tv {
        TvChoice::Aniso => vec![TvVariant::Anisotropic],
        TvChoice::Iso => vec![TvVariant::Isotropic],
        TvChoice::Both => vec![TvVariant::Anisotropic, TvVariant::Isotropic],
    };
    let algorithms = args.algo.algorithms();
    let mut summary = Vec::new();
    for variant in variants {
        let inst = build_tv_dual(observed.clone(), shape, args.lambda, variant, blur_settings)?;
        // the two algorithms share the instance read-only
        let records: Vec<CliResult<RunRecord>> = std::thread::scope(|s| {
            let handles: Vec<_> = algorithms
                .iter()
                .map(|&alg| {
                    let (inst, original, args) = (&inst, &original, &args);
                    s.spawn(move || run_one(inst, original, alg, args))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("solver thread panicked"))
                .collect()
        });
        let mut done = Vec::new();
        for (alg, rec) in algorithms.iter().zip(records) {
            let rec = rec?;
            let tag = format!("{}_{}", alg.name(), variant.short_name());
            write_trace(&args.out.join(format!("trace_{tag}.csv")), &rec, ObjectiveKind::Dual)?;
            write_timing(&args.out.join(format!("timing_{tag}.csv")), &rec)?;
            write_pgm(
                &args.out.join(format!("reconstructed_{tag}.pgm")),
                shape,
                &rec.final_state.p,
            )?;
            let last = rec.last().expect("a valid run has rows");
            let isnr = last.metrics.get("isnr_db").copied().unwrap_or(f64::NAN);
            let primal = last.metrics.get("objective_primal").copied().unwrap_or(f64::NAN);
            println!(
                "{:<9} {:<5} iterations {:>6}  primal objective {:.6e}  feasibility {:.3e}  ISNR {:.2} dB",
                alg.name(),
                variant.short_name(),
                rec.iterations(),
                primal,
                last.feasibility,
                isnr
            );
            summary.push(json!({
                "algorithm": alg.name(),
                "variant": variant.short_name(),
                "status": format!("{:?}", rec.status),
                "iterations": rec.iterations(),
                "elapsed_s": last.elapsed,
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
            let v = variant.short_name();
            let obj = line_chart(
                &format!("TV deblurring ({v}), objective"),
                "iteration",
                "primal objective",
                &series("objective_primal"),
                true,
            );
            let isnr = line_chart(
                &format!("TV deblurring ({v}), ISNR"),
                "iteration",
                "ISNR (dB)",
                &series("isnr_db"),
                false,
            );
            for (name, svg) in [(format!("objective_{v}.svg"), obj), (format!("isnr_{v}.svg"), isnr)] {
                let path = args.out.join(name);
                std::fs::write(&path, svg).map_err(|e| CliError::io(&path, e))?;
            }
        }
    }
    write_json(
        &args.out.join("run.json"),
        &json!({ "command": "tv", "seed": seed, "args": args, "runs": summary }),
    )?;
    Ok(ExitCode::SUCCESS)
}
