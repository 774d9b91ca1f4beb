//! Self-checks against the oracles: operators, proxes and the solver on
//! small quadratic instances.

use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use proxama::linop::{
    estimate_norm, make_dense, make_discrete_gradient, make_gaussian_blur, worst_adjoint_mismatch, ImageShape,
    LinearMap,
};
use proxama::oracle::{prox_grid_oracle, quadratic_saddle, subgradient_certificate, QuadraticInstance};
use proxama::problems::{build_quadratic, default_stepsize};
use proxama::prox::{
    moreau_residual, BoxIndicator, GroupL2Norm, Hinge, HingeConjugate, L1Norm, PairwiseBallIndicator, ProxFn,
};
use proxama::solver::{solve, Algorithm, IterateState, LyapunovMonitor, MetricRule, NoMonitor, Schedule, SolverConfig};

use crate::args::CheckArgs;
use crate::config::resolve_seed;
use crate::error::CliResult;

fn inputs(seed: u64, count: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect()
}

fn report(name: &str, ok: bool, detail: String) -> bool {
    println!("{:<4} {name:<28} {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

pub fn run(args: CheckArgs) -> CliResult<ExitCode> {
    let seed = resolve_seed(args.seed)?;
    let mut all = true;

    let shape = ImageShape::new(32, 32)?;
    let grad = make_discrete_gradient(shape);
    let blur = make_gaussian_blur(shape, 9, 4.0)?;
    let dense = make_dense(&inputs(seed ^ 0x51, 6, 4))?;
    let ops: [(&str, &dyn LinearMap); 3] = [("dense", &dense), ("gradient", &grad), ("blur", &blur)];
    let worst = ops
        .iter()
        .map(|(_, op)| worst_adjoint_mismatch(*op, 100, seed))
        .fold(0.0, f64::max);
    all &= report("adjoint consistency", worst <= 1e-10, format!("worst {worst:.1e}"));
    let g2 = estimate_norm(&grad, 2000, 1e-14).powi(2);
    all &= report("gradient norm", g2 <= 8.0 + 1e-6, format!("|L|^2 = {g2:.6}"));
    let bn = estimate_norm(&blur, 2000, 1e-15);
    all &= report("blur norm", (bn - 1.0).abs() <= 1e-8, format!("|A| = {bn:.10}"));

    let labels = vec![1.0, -1.0, -1.0, 1.0, 1.0, -1.0];
    let pairs: Vec<(&str, Box<dyn ProxFn>, Box<dyn ProxFn>)> = vec![
        (
            "l1/box",
            Box::new(L1Norm { dim: 6, weight: 0.5 }),
            Box::new(BoxIndicator::symmetric(6, 0.5)),
        ),
        (
            "group-l2/ball",
            Box::new(GroupL2Norm { pairs: 3, weight: 0.8 }),
            Box::new(PairwiseBallIndicator { pairs: 3, radius: 0.8 }),
        ),
        (
            "hinge",
            Box::new(Hinge::new(labels.clone(), 1.0)?),
            Box::new(HingeConjugate::new(labels, 1.0)?),
        ),
    ];
    let mut moreau: f64 = 0.0;
    let mut cert_ok = true;
    for (_, f, fc) in &pairs {
        for (i, x) in inputs(seed, 100, 6).iter().enumerate() {
            let gamma = 0.1 + (i % 10) as f64 * 0.3;
            moreau = moreau.max(moreau_residual(
                |g, v| f.prox(g, v).expect("dimensions match"),
                |g, v| fc.prox(g, v).expect("dimensions match"),
                gamma,
                x,
            ));
            for h in [f, fc] {
                let p = h.prox(gamma, x)?;
                cert_ok &= subgradient_certificate(|y| h.value(y), gamma, x, &p, 20, seed + i as u64).passed;
            }
        }
    }
    all &= report(
        "Moreau decomposition",
        moreau <= 1e-10,
        format!("worst residual {moreau:.1e}"),
    );
    all &= report("subgradient certificates", cert_ok, "all prox outputs".into());

    let grid: Vec<Box<dyn ProxFn>> = vec![
        Box::new(L1Norm { dim: 1, weight: 0.7 }),
        Box::new(Hinge::new(vec![1.0], 1.0)?),
        Box::new(GroupL2Norm { pairs: 1, weight: 0.6 }),
        Box::new(PairwiseBallIndicator { pairs: 1, radius: 1.1 }),
    ];
    let (half, n) = (5.0, 401);
    let h = 2.0 * half / (n - 1) as f64;
    let mut grid_gap: f64 = 0.0;
    for f in &grid {
        for x in inputs(seed ^ 0x9e37, 5, f.dim()) {
            let bounds: Vec<(f64, f64)> = x.iter().map(|v| (v - half, v + half)).collect();
            let o = prox_grid_oracle(|y| f.value(y), 1.0, &x, &bounds, n)?;
            let p = f.prox(1.0, &x)?;
            grid_gap = grid_gap.max(p.iter().zip(&o).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
    }
    all &= report(
        "grid oracle",
        grid_gap <= 2.0 * h,
        format!("worst gap {grid_gap:.1e} (grid {h})"),
    );

    let inst = QuadraticInstance::identity_coupled(vec![1.0, 1.0]);
    let problem = build_quadratic(&inst)?;
    let saddle = quadratic_saddle(&inst)?;
    let m2 = MetricRule::Induced(Schedule::Constant(0.5));
    let rec = solve(
        &problem,
        &SolverConfig::new(1.0).with_max_iter(5000).with_tol(1e-12),
        &MetricRule::Zero,
        &m2,
        Algorithm::ProximalAma,
        IterateState::zeros(&problem),
        NoMonitor,
    )?;
    let d = rec.final_state.distance(&saddle.x, &saddle.z, &saddle.p);
    all &= report(
        "quadratic convergence",
        d <= 1e-8,
        format!("distance {d:.1e} after {} iterations", rec.iterations()),
    );

    let mut lyap_ok = true;
    let mut same = true;
    for i in 0..5u64 {
        let inst = QuadraticInstance::random(3 + i as usize, 3, 4, seed + i);
        let problem = build_quadratic(&inst)?;
        let saddle = quadratic_saddle(&inst)?;
        let c = default_stepsize(&problem);
        let m2 = MetricRule::Induced(Schedule::Constant(0.9 / (c * problem.b_norm().powi(2))));
        let config = SolverConfig::new(c).with_max_iter(100).with_tol(0.0);
        let mut mon = LyapunovMonitor::new(saddle);
        solve(
            &problem,
            &config,
            &MetricRule::Zero,
            &m2,
            Algorithm::ProximalAma,
            IterateState::zeros(&problem),
            &mut mon,
        )?;
        lyap_ok &= mon
            .terms
            .iter()
            .all(|t| t.v_next <= t.v_k + 1e-9 * (1.0 + t.v_k) && t.r.iter().all(|(_, v)| *v >= -1e-12));
        let run = |alg| {
            solve(
                &problem,
                &config,
                &MetricRule::Zero,
                &MetricRule::Zero,
                alg,
                IterateState::zeros(&problem),
                NoMonitor,
            )
        };
        same &= run(Algorithm::Ama)?.final_state == run(Algorithm::ProximalAma)?.final_state;
    }
    all &= report("Lyapunov decrease", lyap_ok, "5 random instances".into());
    all &= report("reduction to AMA", same, "5 random instances, bitwise".into());

    Ok(if all { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
