use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::trace::{Recorder, Status, Trace};
use crate::losses::Loss;
use crate::model::L1Problem;
use crate::{Error, Result};

/// `sgn(xᵢ)·max(|xᵢ| − τ, 0)` componentwise.
pub fn soft_threshold(x: &DVector<f64>, tau: f64) -> DVector<f64> {
    assert!(tau >= 0.0, "threshold must be nonnegative");
    x.map(|v| v.signum() * (v.abs() - tau).max(0.0))
}

/// Soft thresholding with a per-coordinate threshold.
pub fn weighted_soft_threshold(x: &DVector<f64>, tau: &DVector<f64>) -> DVector<f64> {
    x.zip_map(tau, |v, t| v.signum() * (v.abs() - t).max(0.0))
}

/// Settings for [`prox_gradient`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxConfig {
    /// Initial stepsize.
    pub step: f64,
    /// Halve the step whenever the quadratic upper model fails.
    pub backtrack: bool,
    pub max_iter: usize,
    /// Stop once `‖x⁺ − x‖ / step ≤ tol`.
    pub tol: f64,
    pub record_every: usize,
}

impl Default for ProxConfig {
    fn default() -> Self {
        Self {
            step: 1.0,
            backtrack: true,
            max_iter: 1_000_000,
            tol: 1e-10,
            record_every: 1000,
        }
    }
}

const DIVERGENCE_STREAK: usize = 10;

/// Proximal gradient on `h(x) + Σ wᵢ|xᵢ|`.
///
/// The trace records the objective at each iterate and, as its gradient norm,
/// the prox residual `‖x⁺ − x‖ / step`. With `backtrack` off the step is
/// fixed and the run fails with [`Error::StepTooLarge`] once the objective
/// rises for ten consecutive iterations.
pub fn prox_gradient(loss: &dyn Loss, weights: &DVector<f64>, x0: &DVector<f64>, cfg: &ProxConfig) -> Result<Trace> {
    let n = loss.dim();
    if x0.len() != n || weights.len() != n {
        return Err(Error::invalid("dimension mismatch in proximal gradient"));
    }
    if !(cfg.step > 0.0 && cfg.step.is_finite()) {
        return Err(Error::invalid(format!("step must be positive, got {}", cfg.step)));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::invalid("penalty weights must be nonnegative"));
    }
    let objective =
        |x: &DVector<f64>| loss.value(x) + x.iter().zip(weights.iter()).map(|(v, w)| w * v.abs()).sum::<f64>();

    let mut x = x0.clone();
    let mut t = cfg.step;
    let mut fx = objective(&x);
    if !fx.is_finite() {
        return Err(Error::non_finite("objective", &x));
    }
    let mut values = vec![];
    let mut residuals = vec![];
    let mut stepsizes = vec![];
    let mut backtracks = vec![];
    let mut backtrack_count = 0;
    let mut recorder = Recorder::new(cfg.record_every);
    recorder.push(0, x.iter().copied().collect());
    let mut rising = 0;

    let status = loop {
        let k = values.len();
        values.push(fx);
        let hx = loss.value(&x);
        let g = loss.grad(&x);
        if !g.iter().all(|v| v.is_finite()) {
            residuals.push(f64::NAN);
            stepsizes.push(t);
            break Status::NonFinite;
        }
        let mut cuts = 0;
        let next = loop {
            let cand = weighted_soft_threshold(&(&x - &g * t), &(weights * t));
            if !cfg.backtrack {
                break cand;
            }
            let d = &cand - &x;
            let model = hx + g.dot(&d) + d.norm_squared() / (2.0 * t);
            let hc = loss.value(&cand);
            if hc <= model + 4.0 * f64::EPSILON * hx.abs().max(1.0) || cuts >= 200 {
                break cand;
            }
            t *= 0.5;
            cuts += 1;
        };
        backtrack_count += cuts;
        backtracks.push(cuts);
        let residual = (&next - &x).norm() / t;
        residuals.push(residual);
        stepsizes.push(t);
        if residual <= cfg.tol {
            break Status::Converged;
        }
        if k == cfg.max_iter {
            break Status::MaxIter;
        }
        let fn_ = objective(&next);
        if !fn_.is_finite() {
            break Status::NonFinite;
        }
        if fn_ > fx {
            rising += 1;
            if !cfg.backtrack && rising >= DIVERGENCE_STREAK {
                return Err(Error::StepTooLarge {
                    step: t,
                    streak: rising,
                });
            }
        } else {
            rising = 0;
        }
        x = next;
        fx = fn_;
        recorder.push(k + 1, x.iter().copied().collect());
    };
    backtracks.resize(values.len(), 0);
    let decreases = values.windows(2).map(|w| w[1] - w[0]).collect();

    Ok(Trace {
        values,
        grad_norms: residuals,
        stepsizes,
        iterates: recorder.finish(),
        status,
        backtrack_count,
        backtracks,
        decreases,
    })
}

/// ISTA with a fixed step: `x⁺ = soft_threshold(x − step·∇h(x), step·μ)`.
pub fn ista(prob: &L1Problem, x0: &DVector<f64>, step: f64, max_iter: usize, tol: f64) -> Result<Trace> {
    let weights = DVector::from_element(prob.dim(), prob.mu());
    let cfg = ProxConfig {
        step,
        backtrack: false,
        max_iter,
        tol,
        record_every: 1000,
    };
    prox_gradient(prob.loss().as_ref(), &weights, x0, &cfg)
}

/// Newton refinement of `∇h(s)ᵢ = −wᵢ·sgn(sᵢ)` on the support of `s`.
///
/// Stops early and returns the input unchanged if a step would flip a sign or
/// the support Hessian is singular. Used to tighten solutions from first-order
/// methods.
pub fn newton_polish(loss: &dyn Loss, weights: &DVector<f64>, s: &DVector<f64>, iters: usize) -> DVector<f64> {
    let support: Vec<usize> = (0..s.len()).filter(|&i| s[i] != 0.0).collect();
    if support.is_empty() {
        return s.clone();
    }
    let mut x = s.clone();
    for _ in 0..iters {
        let g = loss.grad(&x);
        let h = loss.hess(&x);
        let k = support.len();
        let rhs = DVector::from_fn(k, |r, _| {
            let i = support[r];
            g[i] + weights[i] * x[i].signum()
        });
        if rhs.amax() == 0.0 {
            break;
        }
        let hs = nalgebra::DMatrix::from_fn(k, k, |r, c| h[(support[r], support[c])]);
        let Some(delta) = hs.lu().solve(&rhs) else {
            return s.clone();
        };
        let mut next = x.clone();
        for (r, &i) in support.iter().enumerate() {
            next[i] -= delta[r];
            if next[i].signum() != s[i].signum() || next[i] == 0.0 {
                return s.clone();
            }
        }
        if !next.iter().all(|v| v.is_finite()) {
            return s.clone();
        }
        x = next;
    }
    x
}
