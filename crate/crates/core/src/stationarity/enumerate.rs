use nalgebra::DVector;
use serde::Serialize;

use crate::losses::Loss;
use crate::solvers::newton_polish;
use crate::{Error, HdpPoint, L1Problem, Result};

/// Settings for [`enumerate_stationary`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnumerateConfig {
    pub n_max: usize,
    /// Acceptance bound on `‖∇F‖` for a returned point.
    pub grad_tol: f64,
    /// Points closer than this are merged.
    pub dedup_tol: f64,
    /// Projected-gradient stopping tolerance on each face.
    pub face_tol: f64,
    pub max_iter: usize,
}

impl Default for EnumerateConfig {
    fn default() -> Self {
        Self {
            n_max: 4,
            grad_tol: 1e-8,
            dedup_tol: 1e-8,
            face_tol: 1e-12,
            max_iter: 200_000,
        }
    }
}

fn project(s: &DVector<f64>, sigma: &[i8]) -> DVector<f64> {
    DVector::from_fn(s.len(), |i, _| match sigma[i] {
        0 => 0.0,
        1 => s[i].max(0.0),
        _ => s[i].min(0.0),
    })
}

/// Minimizes `h(s) + μσᵀs` over `{σᵢsᵢ ≥ 0, sᵢ = 0 where σᵢ = 0}` by
/// projected gradient with backtracking. On that face the objective is `f`.
fn face_minimize(loss: &dyn Loss, mu: f64, sigma: &[i8], cfg: &EnumerateConfig) -> Option<DVector<f64>> {
    let n = sigma.len();
    let tilt = DVector::from_fn(n, |i, _| mu * f64::from(sigma[i]));
    let phi = |s: &DVector<f64>| loss.value(s) + tilt.dot(s);
    let mut s = DVector::zeros(n);
    let mut val = phi(&s);
    let mut t = 1.0;
    for _ in 0..cfg.max_iter {
        let g = loss.grad(&s) + &tilt;
        let mut cuts = 0;
        let (next, next_val) = loop {
            let cand = project(&(&s - &g * t), sigma);
            let d = &cand - &s;
            let cv = phi(&cand);
            if cv.is_finite()
                && cv <= val + g.dot(&d) + d.norm_squared() / (2.0 * t) + 4.0 * f64::EPSILON * val.abs().max(1.0)
            {
                break (cand, cv);
            }
            t *= 0.5;
            cuts += 1;
            if cuts > 200 {
                return None;
            }
        };
        let moved = (&next - &s).norm() / t;
        s = next;
        val = next_val;
        if moved <= cfg.face_tol {
            return Some(s);
        }
        if !(val > -1e100) || s.amax() > 1e12 {
            return None;
        }
    }
    None
}

/// All F-stationary points of a small convex instance, up to the sign of
/// each `aᵢ` and `bᵢ`.
///
/// Every stationary `s` of `f` restricted to a closed orthant face is found by
/// minimizing `f` on each face `σ ∈ {−1, 0, 1}ⁿ`, polished by Newton's method
/// on the support and lifted to `(√s₊, √s₋)`. Sign flips of individual
/// coordinates of a returned point are stationary as well and share its
/// classification. Faces whose solve fails are skipped with a warning.
pub fn enumerate_stationary(prob: &L1Problem, cfg: &EnumerateConfig) -> Result<Vec<HdpPoint>> {
    let loss = prob.loss();
    if !loss.is_convex() {
        return Err(Error::Unsupported(format!(
            "stationary-point enumeration needs a convex loss, got {}",
            loss.label()
        )));
    }
    let n = prob.dim();
    if n > cfg.n_max {
        return Err(Error::invalid(format!("dimension {n} exceeds n_max = {}", cfg.n_max)));
    }
    let weights = DVector::from_element(n, prob.mu());
    let mut found: Vec<HdpPoint> = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let sigma: Vec<i8> = (0..n).map(|i| (code / 3usize.pow(i as u32) % 3) as i8 - 1).collect();
        let Some(s) = face_minimize(loss.as_ref(), prob.mu(), &sigma, cfg) else {
            log::warn!("face {sigma:?}: projected gradient did not converge, skipped");
            continue;
        };
        let polished = newton_polish(loss.as_ref(), &weights, &s, 20);
        let s = if prob.subdiff_dist(&polished) <= prob.subdiff_dist(&s) {
            polished
        } else {
            s
        };
        let p = HdpPoint::lift(&s);
        let gn = prob.hdp_grad(&p).norm();
        if gn > cfg.grad_tol {
            log::warn!("face {sigma:?}: lifted point has ‖∇F‖ = {gn:e}, skipped");
            continue;
        }
        if found.iter().all(|q| q.distance(&p) > cfg.dedup_tol) {
            found.push(p);
        }
    }
    Ok(found)
}
