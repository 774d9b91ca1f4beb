//! Seeded generators for the test image and the classification data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::linop::{ImageShape, LinearMap};

/// Piecewise-constant image on `[0, 1]` made of a background, two rectangles,
/// a disc and a triangle, with seeded placement and intensities.
pub fn shapes_image(shape: ImageShape, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n) = (shape.rows as f64, shape.cols as f64);
    let mut img = vec![rng.random_range(0.05..0.2); shape.len()];

    let mut rects = Vec::new();
    for _ in 0..2 {
        let r0 = rng.random_range(0.05..0.45) * m;
        let c0 = rng.random_range(0.05..0.45) * n;
        let h = rng.random_range(0.25..0.5) * m;
        let w = rng.random_range(0.25..0.5) * n;
        rects.push((r0, c0, r0 + h, c0 + w, rng.random_range(0.4..0.9)));
    }
    let disc = (
        rng.random_range(0.35..0.65) * m,
        rng.random_range(0.35..0.65) * n,
        rng.random_range(0.12..0.22) * m.min(n),
        rng.random_range(0.6..1.0),
    );
    let tri_level = rng.random_range(0.2..0.7);
    let tri_base = rng.random_range(0.7..0.9) * m;

    for i in 0..shape.rows {
        for j in 0..shape.cols {
            let (y, x) = (i as f64 + 0.5, j as f64 + 0.5);
            let v = &mut img[shape.index(i, j)];
            for &(r0, c0, r1, c1, level) in &rects {
                if y >= r0 && y < r1 && x >= c0 && x < c1 {
                    *v = level;
                }
            }
            if (y - disc.0).powi(2) + (x - disc.1).powi(2) <= disc.2 * disc.2 {
                *v = disc.3;
            }
            // right triangle in the lower-left corner
            if y >= tri_base && x <= (y - tri_base) * 1.5 + 0.1 * n {
                *v = tri_level;
            }
        }
    }
    img
}

pub fn add_gaussian_noise(x: &[f64], std: f64, seed: u64) -> Result<Vec<f64>> {
    let normal = Normal::new(0.0, std).map_err(|e| Error::InvalidConfig(format!("noise std {std}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(x.iter().map(|v| v + normal.sample(&mut rng)).collect())
}

/// `A x + noise`.
pub fn degrade(original: &[f64], blur: &dyn LinearMap, noise_std: f64, seed: u64) -> Result<Vec<f64>> {
    let blurred = blur.apply(original)?;
    if noise_std == 0.0 {
        return Ok(blurred);
    }
    add_gaussian_noise(&blurred, noise_std, seed)
}

/// Labeled points in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledData {
    /// Row-major `n x d` features.
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
}

impl LabeledData {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlobSettings {
    pub train: usize,
    pub test: usize,
    /// Blob centers are `(+center, +center)` and `(-center, -center)`.
    pub center: f64,
    pub std: f64,
    /// Training points closer than this to an accepted one are redrawn, which
    /// keeps the Gram matrix away from singularity. The default equals the
    /// default kernel width.
    pub min_separation: f64,
    /// Points whose signed distance to the separating line `u + v = 0` is
    /// below this are redrawn, so the classes are separable.
    pub margin: f64,
}

impl Default for BlobSettings {
    fn default() -> Self {
        Self {
            train: 200,
            test: 100,
            center: 3.0,
            std: 1.0,
            min_separation: 0.2,
            margin: 1.0,
        }
    }
}

/// Two Gaussian blobs with labels `+1` / `-1`, alternating, as `(train, test)`.
pub fn gaussian_blobs(settings: &BlobSettings, seed: u64) -> Result<(LabeledData, LabeledData)> {
    let normal =
        Normal::new(0.0, settings.std).map_err(|e| Error::InvalidConfig(format!("blob std {}: {e}", settings.std)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |count: usize, spaced: bool| -> Result<LabeledData> {
        let mut features: Vec<Vec<f64>> = Vec::with_capacity(count);
        let mut labels = Vec::with_capacity(count);
        let sep2 = settings.min_separation * settings.min_separation;
        for i in 0..count {
            let y = if i % 2 == 0 { 1.0 } else { -1.0 };
            let mut attempts = 0;
            let point = loop {
                let p = vec![
                    y * settings.center + normal.sample(&mut rng),
                    y * settings.center + normal.sample(&mut rng),
                ];
                let side = y * (p[0] + p[1]) / std::f64::consts::SQRT_2;
                let clear = side >= settings.margin
                    && (!spaced
                        || features
                            .iter()
                            .all(|q| (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) >= sep2));
                if clear {
                    break p;
                }
                attempts += 1;
                if attempts > 10_000 {
                    return Err(Error::InvalidConfig(
                        "blob separation or margin too large for the requested sample size".into(),
                    ));
                }
            };
            features.push(point);
            labels.push(y);
        }
        Ok(LabeledData { features, labels })
    };
    let train = draw(settings.train, true)?;
    let test = draw(settings.test, false)?;
    Ok((train, test))
}
