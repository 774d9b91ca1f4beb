use super::config::InnerSettings;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FistaOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Norm of the composite gradient mapping at the last step.
    pub gradient_mapping: f64,
}

/// Accelerated proximal gradient for `min s(x) + n(x)`.
///
/// `grad(y, out)` writes the gradient of the smooth part, `lipschitz` bounds
/// its Lipschitz constant, and `prox(t, v, out)` writes `prox_{t n}(v)`.
/// Stops when `L |y - prox(y - grad(y)/L)| <= settings.tol` or after
/// `settings.max_iter` steps.
pub fn fista<G, P>(
    mut grad: G,
    lipschitz: f64,
    mut prox: P,
    x0: &[f64],
    settings: &InnerSettings,
) -> Result<FistaOutcome>
where
    G: FnMut(&[f64], &mut [f64]),
    P: FnMut(f64, &[f64], &mut [f64]),
{
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return Err(Error::Argument(format!(
            "FISTA needs a positive Lipschitz constant, got {lipschitz}"
        )));
    }
    let n = x0.len();
    let step = 1.0 / lipschitz;
    let mut x = x0.to_vec();
    let mut y = x0.to_vec();
    let mut x_new = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut t = 1.0f64;
    let mut gm = f64::INFINITY;
    let mut iterations = 0;

    for it in 1..=settings.max_iter.max(1) {
        iterations = it;
        grad(&y, &mut g);
        for i in 0..n {
            v[i] = y[i] - step * g[i];
        }
        prox(step, &v, &mut x_new);
        let mut sq = 0.0;
        for i in 0..n {
            let d = y[i] - x_new[i];
            sq += d * d;
        }
        gm = lipschitz * sq.sqrt();
        if !gm.is_finite() {
            return Err(Error::Numerical {
                iter: it,
                what: "FISTA iterate".into(),
            });
        }
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_new;
        for i in 0..n {
            y[i] = x_new[i] + beta * (x_new[i] - x[i]);
        }
        std::mem::swap(&mut x, &mut x_new);
        t = t_new;
        if gm <= settings.tol {
            break;
        }
    }
    Ok(FistaOutcome {
        x,
        iterations,
        gradient_mapping: gm,
    })
}
