//! wasm-bindgen exports for the browser demo in `www/`.
//!
//! Each export is a thin wrapper around a plain function so the numerics can
//! be tested natively.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use wasm_bindgen::prelude::*;

use proxama::linop::{make_gaussian_blur, ImageShape};
use proxama::problems::{
    build_svm, build_tv_dual, decision_values, degrade, gaussian_blobs, run_tv_scheme, shapes_image, tv_default_sigma,
    BlobSettings, BlurSettings, SvmMonitor, TvMonitor, TvVariant, TV_STEPSIZE,
};
use proxama::prox::{BoxIndicator, Hinge, HingeConjugate, L1Norm, ProxFn};
use proxama::solver::{solve, Algorithm, MetricRule};

fn js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Result of a deblurring run. Images are row-major with values in about [0, 1].
#[wasm_bindgen(getter_with_clone)]
pub struct TvResult {
    pub original: Vec<f64>,
    pub observed: Vec<f64>,
    pub reconstructed: Vec<f64>,
    /// ISNR in dB per iteration, starting at iteration 0.
    pub isnr: Vec<f64>,
    pub objective: Vec<f64>,
    pub feasibility: Vec<f64>,
}

pub fn deblur(
    size: usize,
    lambda: f64,
    iters: usize,
    isotropic: bool,
    proximal: bool,
    seed: u64,
) -> proxama::Result<TvResult> {
    let shape = ImageShape::new(size, size)?;
    let blur_settings = BlurSettings::default();
    let blur = make_gaussian_blur(shape, blur_settings.size, blur_settings.std)?;
    let original = shapes_image(shape, seed);
    let observed = degrade(&original, &blur, 1e-3, seed.wrapping_add(1))?;
    let variant = if isotropic {
        TvVariant::Isotropic
    } else {
        TvVariant::Anisotropic
    };
    let inst = build_tv_dual(observed.clone(), shape, lambda, variant, blur_settings)?;
    let config = inst.solver_config(TV_STEPSIZE, iters);
    let monitor = TvMonitor::new(&inst, Some(original.clone()));
    let rec = if proximal {
        run_tv_scheme(&inst, &config, tv_default_sigma(TV_STEPSIZE), monitor)?
    } else {
        let zero = MetricRule::Zero;
        solve(
            &inst.problem,
            &config,
            &zero,
            &zero,
            Algorithm::Ama,
            inst.initial_state(),
            monitor,
        )?
    };
    Ok(TvResult {
        original,
        observed,
        reconstructed: rec.final_state.p.clone(),
        isnr: rec.metric("isnr_db"),
        objective: rec.metric("objective_primal"),
        feasibility: rec.rows.iter().map(|r| r.feasibility).collect(),
    })
}

/// Synthetic shapes image, blurred and noisy, restored by TV deblurring.
#[wasm_bindgen]
pub fn tv_deblur(
    size: usize,
    lambda: f64,
    iters: usize,
    isotropic: bool,
    proximal: bool,
    seed: u32,
) -> Result<TvResult, JsError> {
    deblur(size, lambda, iters, isotropic, proximal, seed as u64).map_err(js)
}

#[wasm_bindgen(getter_with_clone)]
pub struct SvmResult {
    /// Training points as interleaved `(u, v)` pairs.
    pub points: Vec<f64>,
    pub labels: Vec<f64>,
    /// Decision values on a `grid_n x grid_n` grid over `[-extent, extent]^2`,
    /// row-major with `v` decreasing down the rows.
    pub surface: Vec<f64>,
    pub extent: f64,
    /// Misclassified training points at the last iterate, in percent.
    pub train_error_pct: f64,
    pub iterations: usize,
}

pub fn svm(
    train_size: usize,
    weight: f64,
    sigma: f64,
    tau: f64,
    iters: usize,
    grid_n: usize,
    seed: u64,
) -> proxama::Result<SvmResult> {
    if grid_n < 2 {
        return Err(proxama::Error::Argument(format!(
            "grid needs at least 2 points, got {grid_n}"
        )));
    }
    let settings = BlobSettings {
        train: train_size,
        test: 0,
        ..BlobSettings::default()
    };
    let (train, _) = gaussian_blobs(&settings, seed)?;
    let inst = build_svm(train.features.clone(), train.labels.clone(), weight, sigma)?;
    let c = inst.recommended_stepsize()?;
    let config = inst.config(c, iters, 1e-10);
    let monitor = SvmMonitor::new(&inst, None, Some((&train.features, &train.labels)))?;
    let alg = if tau > 0.0 {
        Algorithm::ProximalAma
    } else {
        Algorithm::Ama
    };
    let rec = inst.run(alg, tau, &config, monitor)?;

    let extent = train
        .features
        .iter()
        .flatten()
        .fold(1.0_f64, |m, v| m.max(v.abs()))
        .ceil();
    let step = 2.0 * extent / (grid_n - 1) as f64;
    let query: Vec<Vec<f64>> = (0..grid_n)
        .flat_map(|i| (0..grid_n).map(move |j| vec![-extent + j as f64 * step, extent - i as f64 * step]))
        .collect();
    let surface = decision_values(&rec.final_state.x, &train.features, &query, sigma)?;
    Ok(SvmResult {
        points: train.features.concat(),
        labels: train.labels,
        surface,
        extent,
        train_error_pct: rec
            .last()
            .and_then(|r| r.metrics.get("misclass_pct").copied())
            .unwrap_or(f64::NAN),
        iterations: rec.iterations(),
    })
}

/// Kernel SVM on two Gaussian blobs, with the decision surface on a grid.
#[wasm_bindgen]
pub fn svm_surface(
    train_size: usize,
    weight: f64,
    sigma: f64,
    tau: f64,
    iters: usize,
    grid_n: usize,
    seed: u32,
) -> Result<SvmResult, JsError> {
    svm(train_size, weight, sigma, tau, iters, grid_n, seed as u64).map_err(js)
}

/// `prox_{gamma h}(t)` for scalar `t` on `n` points of `[lo, hi]`.
pub fn prox_values(kind: &str, gamma: f64, weight: f64, lo: f64, hi: f64, n: usize) -> proxama::Result<Vec<f64>> {
    let h: Box<dyn ProxFn> = match kind {
        "l1" => Box::new(L1Norm { dim: 1, weight }),
        "box" => Box::new(BoxIndicator::symmetric(1, weight)),
        "hinge" => Box::new(Hinge::new(vec![1.0], weight)?),
        "hinge-conjugate" => Box::new(HingeConjugate::new(vec![1.0], weight)?),
        other => return Err(proxama::Error::Argument(format!("unknown function `{other}`"))),
    };
    if n < 2 || !(hi > lo) {
        return Err(proxama::Error::Argument("need n >= 2 and hi > lo".into()));
    }
    (0..n)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            Ok(h.prox(gamma, &[t])?[0])
        })
        .collect()
}

/// Scalar prox curve of `l1`, `box`, `hinge` or `hinge-conjugate` (label +1).
#[wasm_bindgen]
pub fn prox_curve(kind: &str, gamma: f64, weight: f64, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, JsError> {
    prox_values(kind, gamma, weight, lo, hi, n).map_err(js)
}
