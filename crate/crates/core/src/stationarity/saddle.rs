use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::losses::Loss;
use crate::solvers::{newton_polish, prox_gradient, ProxConfig, Status};
use crate::{Error, L1Problem, Result};

/// Settings for [`saddle_margin_bruteforce`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleMarginConfig {
    pub n_max: usize,
    /// Inner proximal-gradient settings; `tol` bounds the prox residual.
    pub prox: ProxConfig,
    /// Box distances at or below this count as zero.
    pub zero_tol: f64,
}

impl Default for SaddleMarginConfig {
    fn default() -> Self {
        Self {
            n_max: 10,
            prox: ProxConfig::default(),
            zero_tol: 1e-8,
        }
    }
}

/// Minimizer data for one subset `I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetMargin {
    pub subset: Vec<usize>,
    pub minimizer: Vec<f64>,
    /// `vᴵ = ∇h` at the minimizer.
    pub grad: Vec<f64>,
    /// `dist(vᴵ, [−μ, μ]ⁿ)`
    pub box_dist: f64,
    pub status: Status,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaddleMargin {
    pub delta: f64,
    /// `None` when no subset has a positive box distance.
    pub epsilon: Option<f64>,
    /// Prox-residual tolerance of the inner solves; `epsilon` is accurate to
    /// about this times the Lipschitz constant of `∇h`.
    pub inner_tol: f64,
    pub subsets: Vec<SubsetMargin>,
}

fn box_dist(v: &DVector<f64>, mu: f64) -> f64 {
    v.iter().map(|x| (x.abs() - mu).max(0.0).powi(2)).sum::<f64>().sqrt()
}

fn minimize(
    loss: &dyn Loss,
    weights: &DVector<f64>,
    x0: &DVector<f64>,
    cfg: &ProxConfig,
) -> Result<(DVector<f64>, Status, f64)> {
    let trace = prox_gradient(loss, weights, x0, cfg)?;
    let x = DVector::from_column_slice(trace.final_point());
    let x = newton_polish(loss, weights, &x, 20);
    Ok((x, trace.status, trace.final_grad_norm()))
}

/// Strict-saddle margin `δ = min{2μ, 2ε/√n}` by enumerating every subset.
///
/// For each `I ⊆ [n]` the function `f_I = f + μ‖x_I‖₁` is minimized by
/// proximal gradient, `vᴵ = ∇h` is read off at the minimizer, and `ε` is the
/// smallest positive `dist(vᴵ, [−μ, μ]ⁿ)`. Subsets are solved in parallel;
/// the table is ordered by bitmask.
pub fn saddle_margin_bruteforce(prob: &L1Problem, cfg: &SaddleMarginConfig) -> Result<SaddleMargin> {
    let loss = prob.loss();
    if !loss.is_convex() {
        return Err(Error::Unsupported(format!(
            "strict-saddle margin needs a convex loss, got {}",
            loss.label()
        )));
    }
    let n = prob.dim();
    if n > cfg.n_max {
        return Err(Error::invalid(format!("dimension {n} exceeds n_max = {}", cfg.n_max)));
    }
    let mu = prob.mu();
    let subsets = (0..1usize << n)
        .into_par_iter()
        .map(|mask| {
            let weights = DVector::from_fn(n, |i, _| if mask >> i & 1 == 1 { 2.0 * mu } else { mu });
            let (x, status, residual) = minimize(loss.as_ref(), &weights, &DVector::zeros(n), &cfg.prox)?;
            let v = loss.grad(&x);
            Ok(SubsetMargin {
                subset: (0..n).filter(|i| mask >> i & 1 == 1).collect(),
                box_dist: box_dist(&v, mu),
                minimizer: x.iter().copied().collect(),
                grad: v.iter().copied().collect(),
                status,
                residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let epsilon = subsets
        .iter()
        .map(|s| s.box_dist)
        .filter(|&d| d > cfg.zero_tol)
        .min_by(f64::total_cmp);
    let delta = match epsilon {
        Some(eps) => (2.0 * mu).min(2.0 * eps / (n as f64).sqrt()),
        None => 2.0 * mu,
    };
    Ok(SaddleMargin {
        delta,
        epsilon,
        inner_tol: cfg.prox.tol,
        subsets,
    })
}

/// Minimizes `h(x) + Σ wᵢ|xᵢ|` from each start and returns the largest
/// pairwise `‖∇h(x) − ∇h(y)‖` over the minimizers found, with the minimizers.
pub fn minimizer_gradient_spread(
    loss: &dyn Loss,
    weights: &DVector<f64>,
    starts: &[DVector<f64>],
    cfg: &ProxConfig,
) -> Result<(f64, Vec<DVector<f64>>)> {
    let mins = starts
        .par_iter()
        .map(|x0| minimize(loss, weights, x0, cfg).map(|m| m.0))
        .collect::<Result<Vec<_>>>()?;
    let mut spread = 0.0f64;
    for (i, x) in mins.iter().enumerate() {
        for y in &mins[i + 1..] {
            spread = spread.max(loss.grad_diff(x, y).norm());
        }
    }
    Ok((spread, mins))
}
