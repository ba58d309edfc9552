//! Dormand-Prince 5(4) with adaptive steps for complex vector ODEs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub initial_step: Option<f64>,
    /// Smallest step accepted before reporting underflow.
    pub min_step: f64,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            initial_step: None,
            min_step: 1e-22,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Dopri5Stats {
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights are the last row of A; E = b5 - b4
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t1` in place.
pub fn integrate<F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y: &mut CVector,
    opts: &Dopri5Options,
) -> Result<Dopri5Stats>
where
    F: FnMut(f64, &CVector, &mut CVector) -> Result<()>,
{
    let mut stats = Dopri5Stats::default();
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(stats);
    }
    let n = y.len();
    let mut k: Vec<CVector> = (0..7).map(|_| CVector::zeros(n)).collect();
    let mut tmp = CVector::zeros(n);
    let mut y_new = CVector::zeros(n);

    f(t0, y, &mut k[0])?;
    let mut h = opts.initial_step.unwrap_or_else(|| {
        let scale = y.iter().map(|z| z.norm()).fold(0.0, f64::max).max(opts.abs_tol);
        let rate = k[0].iter().map(|z| z.norm()).fold(0.0, f64::max);
        if rate > 0.0 {
            0.01 * scale / rate
        } else {
            span
        }
    });
    h = h.min(opts.max_step).min(span);
    let mut t = t0;

    while t < t1 {
        if t + h > t1 || t1 - (t + h) < 1e-12 * span {
            h = t1 - t;
        }
        for s in 1..7 {
            tmp.copy_from(y);
            for (r, a) in A[s].iter().enumerate().take(s) {
                if *a != 0.0 {
                    tmp.axpy(Complex64::new(h * a, 0.0), &k[r], Complex64::new(1.0, 0.0));
                }
            }
            f(t + C[s] * h, &tmp, &mut k[s])?;
            if s == 6 {
                y_new.copy_from(&tmp);
            }
        }
        // error estimate uses k[6] = f(t + h, y_new) (FSAL)
        let mut err_sq = 0.0;
        for i in 0..n {
            let mut e = Complex64::new(0.0, 0.0);
            for s in 0..7 {
                e += k[s][i] * E[s];
            }
            let sc = opts.abs_tol + opts.rel_tol * y[i].norm().max(y_new[i].norm());
            err_sq += (e.norm() * h / sc).powi(2);
        }
        let err = (err_sq / n as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::NonFinite("ODE state"));
        }
        if err <= 1.0 {
            t += h;
            y.copy_from(&y_new);
            let k6 = k[6].clone();
            k[0].copy_from(&k6);
            stats.accepted += 1;
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * factor).min(opts.max_step);
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            if h < opts.min_step {
                return Err(Error::StepUnderflow { t, step: h });
            }
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_phase() {
        // y' = -i w y has y(t) = exp(-i w t)
        let w = 3.0;
        let mut y = CVector::from_element(1, Complex64::new(1.0, 0.0));
        let opts = Dopri5Options::default();
        integrate(
            |_, y, out| {
                out[0] = Complex64::new(0.0, -w) * y[0];
                Ok(())
            },
            0.0,
            10.0,
            &mut y,
            &opts,
        )
        .unwrap();
        let want = Complex64::from_polar(1.0, -w * 10.0);
        assert!((y[0] - want).norm() < 1e-8);
    }

    #[test]
    fn time_dependent_rhs() {
        // y' = 2 t y, y = exp(t^2)
        let mut y = CVector::from_element(1, Complex64::new(1.0, 0.0));
        integrate(
            |t, y, out| {
                out[0] = y[0] * (2.0 * t);
                Ok(())
            },
            0.0,
            1.5,
            &mut y,
            &Dopri5Options::default(),
        )
        .unwrap();
        assert!((y[0].re - (2.25f64).exp()).abs() < 1e-8 * (2.25f64).exp());
    }

    #[test]
    fn max_step_is_respected() {
        let mut y = CVector::from_element(1, Complex64::new(1.0, 0.0));
        let opts = Dopri5Options {
            max_step: 0.01,
            ..Default::default()
        };
        let stats = integrate(|_, _, out| {
            out[0] = Complex64::new(0.0, 0.0);
            Ok(())
        }, 0.0, 1.0, &mut y, &opts)
        .unwrap();
        assert!(stats.accepted >= 100);
    }
}
