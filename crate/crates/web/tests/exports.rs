use proxama_web::{deblur, prox_values, svm};

#[test]
fn deblur_improves_isnr() {
    let r = deblur(16, 5e-5, 30, true, true, 3).unwrap();
    assert_eq!(r.reconstructed.len(), 256);
    assert_eq!(r.isnr.len(), 31);
    assert!(r.isnr[30] > r.isnr[0], "{:?}", r.isnr);
}

#[test]
fn ama_and_proximal_share_the_start() {
    let a = deblur(12, 5e-5, 3, false, false, 1).unwrap();
    let p = deblur(12, 5e-5, 3, false, true, 1).unwrap();
    assert_eq!(a.observed, p.observed);
    assert_eq!(a.objective[0], p.objective[0]);
}

#[test]
fn svm_surface_separates_blobs() {
    let r = svm(40, 1.0, 0.2, 10.0, 500, 9, 4).unwrap();
    assert_eq!(r.surface.len(), 81);
    assert_eq!(r.points.len(), 80);
    assert!(r.train_error_pct <= 5.0, "{}", r.train_error_pct);
    // top-right corner lies in the +1 blob, bottom-left in the -1 blob
    let n = 9;
    assert!(r.surface[n - 1] >= 0.0 && r.surface[(n - 1) * n] <= 0.0);
}

#[test]
fn prox_curves() {
    let soft = prox_values("l1", 1.0, 0.5, -2.0, 2.0, 5).unwrap();
    assert_eq!(soft, vec![-1.5, -0.5, 0.0, 0.5, 1.5]);
    let clip = prox_values("box", 3.0, 1.0, -2.0, 2.0, 5).unwrap();
    assert_eq!(clip, vec![-1.0, -1.0, 0.0, 1.0, 1.0]);
    assert!(prox_values("huber", 1.0, 1.0, 0.0, 1.0, 3).is_err());
}
