//! Quality measures reported alongside the solver traces.

use crate::error::{check_dim, Result};
use crate::vecops::{dist, norm_sq, sub};

/// Reported when the reconstruction is exact and the ratio is unbounded.
pub const ISNR_SENTINEL_DB: f64 = 300.0;

/// Improvement in signal-to-noise ratio,
/// `10 log10(|orig - degraded|^2 / |orig - current|^2)`, capped at
/// [`ISNR_SENTINEL_DB`].
pub fn isnr(original: &[f64], degraded: &[f64], current: &[f64]) -> Result<f64> {
    check_dim("isnr degraded", original.len(), degraded.len())?;
    check_dim("isnr current", original.len(), current.len())?;
    let num = norm_sq(&sub(original, degraded));
    let den = norm_sq(&sub(original, current));
    if den == 0.0 {
        return Ok(ISNR_SENTINEL_DB);
    }
    Ok((10.0 * (num / den).log10()).min(ISNR_SENTINEL_DB))
}

/// `|x - x_ref| / sqrt(dim)`.
pub fn rmse(x: &[f64], x_ref: &[f64]) -> Result<f64> {
    check_dim("rmse", x_ref.len(), x.len())?;
    if x.is_empty() {
        return Ok(0.0);
    }
    Ok(dist(x, x_ref) / (x.len() as f64).sqrt())
}

/// Percentage of entries whose sign disagrees with the label; a zero decision
/// value counts as an error.
pub fn misclassification_rate(values: &[f64], labels: &[f64]) -> Result<f64> {
    check_dim("misclassification labels", values.len(), labels.len())?;
    if values.is_empty() {
        return Ok(0.0);
    }
    let wrong = values
        .iter()
        .zip(labels)
        .filter(|(v, y)| **v == 0.0 || v.signum() != y.signum())
        .count();
    Ok(100.0 * wrong as f64 / values.len() as f64)
}
