use nalgebra::DVector;

use proxama::linop::{make_gaussian_blur, ImageShape};
use proxama::oracle::{subgradient_certificate, QuadraticInstance};
use proxama::problems::{
    build_svm, build_tv_dual, degrade, gaussian_blobs, run_tv_scheme, shapes_image, tv_default_sigma, BlobSettings,
    BlurSettings, SvmMonitor, TvMonitor, TvVariant, TV_STEPSIZE,
};
use proxama::solver::{Algorithm, MetricHook, Subproblem};

fn tv_small(variant: TvVariant) -> (proxama::problems::TvDualInstance, Vec<f64>) {
    let shape = ImageShape::new(32, 32).unwrap();
    let blur = BlurSettings::default();
    let original = shapes_image(shape, 5);
    let op = make_gaussian_blur(shape, blur.size, blur.std).unwrap();
    let observed = degrade(&original, &op, 1e-3, 6).unwrap();
    (build_tv_dual(observed, shape, 5e-5, variant, blur).unwrap(), original)
}

#[test]
fn tv_isnr_improves_over_first_iterations() {
    for variant in [TvVariant::Anisotropic, TvVariant::Isotropic] {
        let (inst, original) = tv_small(variant);
        let c = TV_STEPSIZE;
        let rec = run_tv_scheme(
            &inst,
            &inst.solver_config(c, 50),
            tv_default_sigma(c),
            TvMonitor::new(&inst, Some(original)),
        )
        .unwrap();
        let isnr = rec.metric("isnr_db");
        assert_eq!(isnr.len(), 51);
        assert!(isnr[0].abs() < 1e-12, "x0 is the observation");
        assert!(isnr[50] > isnr[5] && isnr[5] > 0.0, "{:?}", &isnr[..6]);
        let primal = rec.metric("objective_primal");
        assert!(primal[50] < primal[1]);
    }
}

#[test]
fn tv_dual_argmin_is_certified() {
    let (inst, _) = tv_small(TvVariant::Isotropic);
    let n = inst.shape.len();
    let w: Vec<f64> = (0..n).map(|i| ((i * 7) % 13) as f64 * 0.05 - 0.3).collect();
    let r = inst.problem.f.argmin_linear(&w).unwrap();
    // w in the subdifferential at r  <=>  r = prox_f(r + w)
    let x: Vec<f64> = r.iter().zip(&w).map(|(a, b)| a + b).collect();
    let cert = subgradient_certificate(|v| inst.problem.f.value(v), 1.0, &x, &r, 40, 3);
    assert!(cert.passed, "worst slack {}", cert.worst_slack);
}

#[test]
fn svm_closed_form_matches_dense_solve() {
    let settings = BlobSettings {
        train: 60,
        test: 10,
        ..BlobSettings::default()
    };
    let (train, _) = gaussian_blobs(&settings, 3).unwrap();
    let inst = build_svm(train.features, train.labels, 1.0, 0.2).unwrap();
    let k = inst.gram.matrix().clone();
    let n = k.nrows();
    let p: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
    let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
    let kp = &k * DVector::from_column_slice(&p);
    for tau in [0.1, 1.0, 10.0, 102.0] {
        let got = inst
            .kernel_metric(tau)
            .solve(&Subproblem {
                k: 0,
                prev: &x,
                multiplier: &p,
                linear: kp.as_slice(),
                offset: None,
                stepsize: 1e-2,
            })
            .unwrap();
        let rhs = &kp + &k * DVector::from_column_slice(&x) * tau;
        let want = (&k * (1.0 + tau)).lu().solve(&rhs).unwrap();
        for i in 0..n {
            assert!((got[i] - want[i]).abs() <= 1e-10, "tau {tau}, entry {i}");
        }
    }
}

#[test]
fn svm_small_run_separates_blobs() {
    let settings = BlobSettings {
        train: 60,
        test: 40,
        ..BlobSettings::default()
    };
    let (train, test) = gaussian_blobs(&settings, 8).unwrap();
    let inst = build_svm(train.features, train.labels, 1.0, 0.5).unwrap();
    let c = inst.recommended_stepsize().unwrap();
    let mon = SvmMonitor::new(&inst, None, Some((&test.features, &test.labels))).unwrap();
    let rec = inst
        .run(Algorithm::ProximalAma, 10.0, &inst.config(c, 3000, 1e-8), mon)
        .unwrap();
    assert_eq!(rec.algorithm, Algorithm::ProximalAma);
    assert!(*rec.metric("misclass_pct").last().unwrap() <= 5.0);
}

#[test]
fn quadratic_instance_json_round_trip() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/qp_small.json");
    let inst: QuadraticInstance = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(inst.b, vec![1.0, 1.0]);
    assert_eq!(inst.sigma, Some(0.5));
    let back: QuadraticInstance = serde_json::from_str(&serde_json::to_string(&inst).unwrap()).unwrap();
    assert_eq!(back, inst);
    let bad = r#"{"P":[[1]],"q":[0],"Q":[[1]],"r":[0],"A":[[1]],"B":[[-1]],"b":[1],"extra":1}"#;
    assert!(serde_json::from_str::<QuadraticInstance>(bad).is_err());
}
