use nalgebra::DMatrix;
use proptest::prelude::*;

use proxama::oracle::subgradient_certificate;
use proxama::prox::{
    moreau_residual, project_box, project_pairwise_l2_ball, prox_hinge_conjugate, BoxIndicator, GroupL2Norm, Hinge,
    HingeConjugate, L1Norm, PairwiseBallIndicator, ProxFn, Quadratic,
};

fn vec_of(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, len)
}

fn labels(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1.0 } else { -1.0 }), len)
}

fn functions(dim_pairs: usize) -> Vec<Box<dyn ProxFn>> {
    let d = 2 * dim_pairs;
    vec![
        Box::new(L1Norm { dim: d, weight: 0.6 }),
        Box::new(BoxIndicator::symmetric(d, 1.3)),
        Box::new(GroupL2Norm {
            pairs: dim_pairs,
            weight: 0.9,
        }),
        Box::new(PairwiseBallIndicator {
            pairs: dim_pairs,
            radius: 0.8,
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prox_is_firmly_nonexpansive(x in vec_of(6), y in vec_of(6), gamma in 0.05..4.0f64) {
        for f in functions(3) {
            let px = f.prox(gamma, &x).unwrap();
            let py = f.prox(gamma, &y).unwrap();
            let lhs: f64 = px.iter().zip(&py).map(|(a, b)| (a - b) * (a - b)).sum();
            let rhs: f64 = px.iter().zip(&py).zip(x.iter().zip(&y))
                .map(|((a, b), (u, v))| (a - b) * (u - v)).sum();
            prop_assert!(lhs <= rhs + 1e-12);
        }
    }

    #[test]
    fn prox_output_is_certified(x in vec_of(6), gamma in 0.05..4.0f64, seed in 0u64..1000) {
        for f in functions(3) {
            let p = f.prox(gamma, &x).unwrap();
            let cert = subgradient_certificate(|y| f.value(y), gamma, &x, &p, 30, seed);
            prop_assert!(cert.passed, "worst slack {}", cert.worst_slack);
        }
    }

    #[test]
    fn hinge_moreau_decomposition(z in vec_of(8), y in labels(8), c in 0.1..3.0f64, gamma in 0.05..4.0f64) {
        let g = Hinge::new(y.clone(), c).unwrap();
        let gc = HingeConjugate::new(y.clone(), c).unwrap();
        let r = moreau_residual(|t, v| g.prox(t, v).unwrap(), |t, v| gc.prox(t, v).unwrap(), gamma, &z);
        prop_assert!(r <= 1e-10);
        let p = g.prox(gamma, &z).unwrap();
        prop_assert!(subgradient_certificate(|v| g.value(v), gamma, &z, &p, 30, 1).passed);
        let q = prox_hinge_conjugate(&z, &y, c, gamma).unwrap();
        for (qi, yi) in q.iter().zip(&y) {
            prop_assert!(qi * yi >= -c - 1e-15 && qi * yi <= 1e-15);
        }
    }

    #[test]
    fn projections_land_in_their_sets(v in vec_of(5), w in vec_of(5), lambda in 0.01..3.0f64) {
        let p = project_box(&v, -lambda, lambda).unwrap();
        prop_assert!(p.iter().all(|x| x.abs() <= lambda));
        let (a, b) = project_pairwise_l2_ball(&v, &w, lambda).unwrap();
        for (ai, bi) in a.iter().zip(&b) {
            prop_assert!(ai.hypot(*bi) <= lambda * (1.0 + 1e-12));
        }
        // idempotent up to rounding on the sphere
        let (a2, b2) = project_pairwise_l2_ball(&a, &b, lambda).unwrap();
        for (u, v) in a2.iter().chain(&b2).zip(a.iter().chain(&b)) {
            prop_assert!((u - v).abs() <= 1e-15 * lambda.max(1.0));
        }
    }

    #[test]
    fn quadratic_strong_convexity_and_lipschitz(
        entries in prop::collection::vec(-1.0..1.0f64, 9),
        x in vec_of(3),
        y in vec_of(3),
        t in 0.0..1.0f64,
    ) {
        let g = DMatrix::from_row_slice(3, 3, &entries);
        let p = &g * g.transpose() + DMatrix::identity(3, 3) * 0.5;
        let p = (&p + p.transpose()) * 0.5;
        let f = Quadratic::new(p, vec![0.1, -0.2, 0.3]).unwrap();
        let mu = f.strong_convexity();
        let l = f.lipschitz().unwrap();
        prop_assert!(mu > 0.0 && mu <= l);
        // f - mu/2 |.|^2 convex along the chord
        let h = |v: &[f64]| f.value(v) - 0.5 * mu * v.iter().map(|a| a * a).sum::<f64>();
        let m: Vec<f64> = x.iter().zip(&y).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        prop_assert!(h(&m) <= t * h(&x) + (1.0 - t) * h(&y) + 1e-9);
        let gx = f.gradient(&x).unwrap();
        let gy = f.gradient(&y).unwrap();
        let dg: f64 = gx.iter().zip(&gy).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let dx: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        prop_assert!(dg <= l * dx * (1.0 + 1e-12) + 1e-12);
    }
}
