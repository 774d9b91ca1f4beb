//! Builders for the deblurring and classification experiments and the
//! quadratic test family.

pub mod metrics;
pub mod qp;
pub mod svm;
pub mod synthetic;
pub mod tv;

pub use metrics::{isnr, misclassification_rate, rmse, ISNR_SENTINEL_DB};
pub use qp::{build_quadratic, default_stepsize, hinted_metrics};
pub use svm::{build_svm, cross_kernel, decision_values, gram_matrix, KernelMetric, SvmInstance, SvmMonitor};
pub use synthetic::{add_gaussian_noise, degrade, gaussian_blobs, shapes_image, BlobSettings, LabeledData};
pub use tv::{
    build_tv_dual, run_tv_scheme, tv_default_sigma, BlurSettings, TvDualInstance, TvMonitor, TvVariant, TV_EPSILON,
    TV_STEPSIZE,
};
