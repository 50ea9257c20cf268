//! Fixed-step classical Runge-Kutta integration and order fits.

use num_complex::Complex64;

use crate::error::{HarnessError, Result};

/// States beyond this size count as a blown-up step.
const BLOWUP: f64 = 1e8;

fn axpy(x: &[Complex64], h: f64, k: &[Complex64]) -> Vec<Complex64> {
    x.iter().zip(k).map(|(a, b)| a + b * h).collect()
}

/// One classical fourth-order step.
pub fn rk4_step<F>(f: &F, x: &[Complex64], h: f64) -> Vec<Complex64>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let k1 = f(x);
    let k2 = f(&axpy(x, h / 2.0, &k1));
    let k3 = f(&axpy(x, h / 2.0, &k2));
    let k4 = f(&axpy(x, h, &k3));
    x.iter()
        .enumerate()
        .map(|(i, xi)| xi + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0))
        .collect()
}

/// Integrates from `t0` to `t1` with the largest uniform step not above
/// `h_max`, calling `observe` after every step. Fails on a non-finite or
/// exploding state.
pub fn integrate<F, O>(f: &F, x0: &[Complex64], t0: f64, t1: f64, h_max: f64, mut observe: O) -> Result<Vec<Complex64>>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
    O: FnMut(f64, &[Complex64]),
{
    let steps = ((t1 - t0) / h_max).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let mut x = x0.to_vec();
    for s in 1..=steps {
        x = rk4_step(f, &x, h);
        let t = t0 + s as f64 * h;
        if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite() || z.norm() > BLOWUP) {
            return Err(HarnessError::Property(format!(
                "integrator unstable: step {s} of {steps} (h = {h:e}) rejected at t = {t:.6}"
            )));
        }
        observe(t, &x);
    }
    Ok(x)
}

/// Least-squares slope of `log err` against `log eps`.
pub fn fitted_order(eps: &[f64], err: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = eps.iter().zip(err).map(|(e, r)| (e.ln(), r.max(f64::MIN_POSITIVE).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        f64::NAN
    } else {
        sxy / sxx
    }
}

/// Orders from consecutive pairs, `log(err_i / err_{i+1}) / log(eps_i / eps_{i+1})`.
pub fn pairwise_orders(eps: &[f64], err: &[f64]) -> Vec<f64> {
    eps.windows(2)
        .zip(err.windows(2))
        .map(|(e, r)| (r[0] / r[1]).ln() / (e[0] / e[1]).ln())
        .collect()
}
