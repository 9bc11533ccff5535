//! Scaled conjugate gradient (Møller, 1993).
//!
//! Curvature along the search direction comes from a forward difference of
//! the gradient; the scale λ acts as a Levenberg-Marquardt style trust
//! parameter and is adapted from the ratio of actual to predicted decrease.

use crate::error::{Error, Result};
use crate::linalg::dot;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScgOptions {
    pub max_iters: usize,
    /// Stop once the gradient norm falls below this.
    pub grad_tol: f64,
    /// Stop once an accepted step is smaller than this (max-abs component).
    pub step_tol: f64,
    pub sigma0: f64,
    pub lambda0: f64,
}

impl Default for ScgOptions {
    fn default() -> Self {
        ScgOptions {
            max_iters: 100,
            grad_tol: 1e-6,
            step_tol: 1e-8,
            sigma0: 1e-4,
            lambda0: 1e-6,
        }
    }
}

impl ScgOptions {
    pub fn validate(&self) -> Result<()> {
        let reals = [self.grad_tol, self.step_tol, self.sigma0, self.lambda0];
        if self.max_iters == 0 || reals.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidOption(format!("SCG options must be positive: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    GradTol,
    StepTol,
    MaxIters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScgTrace {
    /// Lowest objective reached after each iteration. This is the current
    /// objective except when a step is accepted inside rounding noise.
    pub errors: Vec<f64>,
    pub iterations: usize,
    pub stop_reason: StopReason,
}

const LAMBDA_MIN: f64 = 1e-15;
const LAMBDA_MAX: f64 = 1e15;
/// Changes below this fraction of |f| are decided from slopes, not values.
const FLAT_EPS: f64 = 1e4 * f64::EPSILON;

/// Minimizes `objective`, which maps a point to (value, gradient).
pub fn minimize<F>(mut objective: F, w0: &[f64], opts: &ScgOptions) -> Result<(Vec<f64>, ScgTrace)>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    opts.validate()?;
    let n = w0.len();
    let mut w = w0.to_vec();
    let (mut f_old, mut g) = objective(&w)?;
    if !f_old.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidStart);
    }
    let mut trace = ScgTrace {
        errors: Vec::new(),
        iterations: 0,
        stop_reason: StopReason::MaxIters,
    };
    if dot(&g, &g).sqrt() < opts.grad_tol {
        trace.stop_reason = StopReason::GradTol;
        return Ok((w, trace));
    }

    let mut g_old = g.clone();
    let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut lambda = opts.lambda0;
    let mut success = true;
    let mut n_success = 0usize;
    let (mut mu, mut kappa, mut theta) = (0.0, 0.0, 0.0);
    let mut w_trial = vec![0.0; n];
    let mut best = f_old;

    for iter in 1..=opts.max_iters {
        trace.iterations = iter;
        if success {
            mu = dot(&d, &g);
            if mu >= 0.0 {
                d = g.iter().map(|v| -v).collect();
                mu = dot(&d, &g);
            }
            kappa = dot(&d, &d);
            if kappa < f64::EPSILON * f64::EPSILON {
                trace.errors.push(best);
                trace.stop_reason = StopReason::GradTol;
                break;
            }
            let sigma = opts.sigma0 / kappa.sqrt();
            for ((t, wi), di) in w_trial.iter_mut().zip(&w).zip(&d) {
                *t = wi + sigma * di;
            }
            let (_, g_plus) = objective(&w_trial)?;
            theta = d
                .iter()
                .zip(g_plus.iter().zip(&g))
                .map(|(di, (gp, gi))| di * (gp - gi))
                .sum::<f64>()
                / sigma;
        }

        // scaled curvature; force it positive
        let mut delta = theta + lambda * kappa;
        if delta <= 0.0 {
            delta = lambda * kappa;
            lambda -= theta / kappa;
        }
        let step = -mu / delta;
        for ((t, wi), di) in w_trial.iter_mut().zip(&w).zip(&d) {
            *t = wi + step * di;
        }
        let (f_new, g_new) = objective(&w_trial)?;
        let comparison = if f_new.is_finite() {
            2.0 * (f_new - f_old) / (step * mu)
        } else {
            -1.0
        };

        // Below rounding level the difference of function values is noise;
        // estimate the change from the end-point slopes (trapezoid rule).
        let flat = f_new.is_finite()
            && (f_new - f_old).abs() <= FLAT_EPS * f_old.abs().max(f_new.abs())
            && (step * mu).abs() <= FLAT_EPS * f_old.abs().max(f64::MIN_POSITIVE);
        let comparison = if flat {
            let change = 0.5 * step * (mu + dot(&d, &g_new));
            if change <= 0.0 {
                2.0 * change / (step * mu)
            } else {
                -1.0
            }
        } else {
            comparison
        };

        let f_prev = f_old;
        if comparison >= 0.0 && (flat || f_new <= f_old) {
            success = true;
            n_success += 1;
            std::mem::swap(&mut w, &mut w_trial);
            f_old = f_new;
            g_old = std::mem::replace(&mut g, g_new);
        } else {
            success = false;
        }
        best = best.min(f_old);
        trace.errors.push(best);

        if success {
            let max_step = d.iter().fold(0.0f64, |m, di| m.max((step * di).abs()));
            if dot(&g, &g).sqrt() < opts.grad_tol {
                trace.stop_reason = StopReason::GradTol;
                break;
            }
            if max_step < opts.step_tol && (f_old - f_prev).abs() < opts.step_tol {
                trace.stop_reason = StopReason::StepTol;
                break;
            }
        }

        if comparison < 0.25 {
            lambda = (4.0 * lambda).min(LAMBDA_MAX);
        } else if comparison > 0.75 {
            lambda = (0.5 * lambda).max(LAMBDA_MIN);
        }

        if n_success == n {
            d = g.iter().map(|v| -v).collect();
            n_success = 0;
        } else if success {
            let beta = (dot(&g_old, &g) - dot(&g, &g)) / mu;
            for (di, gi) in d.iter_mut().zip(&g) {
                *di = beta * *di - gi;
            }
        }
    }
    Ok((w, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_norm_sq(w: &[f64]) -> Result<(f64, Vec<f64>)> {
        Ok((0.5 * dot(w, w), w.to_vec()))
    }

    #[test]
    fn exact_quadratic_converges_fast() {
        let (w, trace) = minimize(half_norm_sq, &[3.0, -2.0, 1.5], &ScgOptions::default()).unwrap();
        assert!(dot(&w, &w).sqrt() < 1e-6);
        assert!(trace.iterations <= 10);
    }

    #[test]
    fn optimal_start_returns_immediately() {
        let (w, trace) = minimize(half_norm_sq, &[0.0, 0.0], &ScgOptions::default()).unwrap();
        assert_eq!(w, vec![0.0, 0.0]);
        assert_eq!(trace.stop_reason, StopReason::GradTol);
        assert_eq!(trace.iterations, 0);
    }

    #[test]
    fn non_finite_start_rejected() {
        let f = |_: &[f64]| Ok((f64::NAN, vec![0.0]));
        let err = minimize(f, &[1.0], &ScgOptions::default()).unwrap_err();
        assert!(err.to_string().contains("invalid start"));
    }

    #[test]
    fn rosenbrock_decreases_monotonically() {
        let f = |w: &[f64]| {
            let (x, y) = (w[0], w[1]);
            let v = (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2);
            let gx = -2.0 * (1.0 - x) - 400.0 * x * (y - x * x);
            let gy = 200.0 * (y - x * x);
            Ok((v, vec![gx, gy]))
        };
        let opts = ScgOptions {
            max_iters: 500,
            grad_tol: 1e-9,
            ..ScgOptions::default()
        };
        let (w, trace) = minimize(f, &[-1.2, 1.0], &opts).unwrap();
        assert!(trace.errors.windows(2).all(|p| p[1] <= p[0]));
        assert!((w[0] - 1.0).abs() < 1e-4 && (w[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn bad_options_rejected() {
        let opts = ScgOptions {
            max_iters: 0,
            ..ScgOptions::default()
        };
        assert!(minimize(half_norm_sq, &[1.0], &opts).is_err());
    }
}
