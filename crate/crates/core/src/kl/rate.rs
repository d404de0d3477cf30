use nalgebra::DVector;
use serde::Serialize;

use super::ols;
use crate::solvers::Trace;
use crate::{Error, HdpPoint, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum RateModel {
    /// `dₖ ≈ C·cᵏ`
    Linear { ratio: f64 },
    /// `dₖ ≈ C·k⁻ᵖ`
    Sublinear { exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    #[serde(flatten)]
    pub model: RateModel,
    pub r_squared: f64,
    /// R² of the model that was not selected.
    pub r_squared_other: f64,
    pub n_points: usize,
}

pub const DIST_FLOOR: f64 = 1e-13;

/// Fits distances `dₖ` at iterations `k` over the last third of the recorded
/// iterations (with `dₖ > 1e-13`), both as `log dₖ ~ k` and as
/// `log dₖ ~ log k`, and keeps the model with the higher R².
pub fn fit_rate(iters: &[usize], dists: &[f64]) -> Result<RateFit> {
    let last = iters.iter().copied().max().unwrap_or(0);
    let start = 2 * last / 3;
    let tail: Vec<(f64, f64)> = iters
        .iter()
        .zip(dists)
        .filter(|&(&k, &d)| k >= start && k > 0 && d > DIST_FLOOR && d.is_finite())
        .map(|(&k, &d)| (k as f64, d.ln()))
        .collect();
    if tail.len() < 3 {
        return Err(Error::invalid(format!(
            "{} tail points above the distance floor, need at least 3",
            tail.len()
        )));
    }
    let y: Vec<f64> = tail.iter().map(|t| t.1).collect();
    let k: Vec<f64> = tail.iter().map(|t| t.0).collect();
    let logk: Vec<f64> = k.iter().map(|v| v.ln()).collect();
    let degenerate = || Error::invalid("tail spans a single iteration");
    let (sl, _, r_lin) = ols(&k, &y).ok_or_else(degenerate)?;
    let (ss, _, r_sub) = ols(&logk, &y).ok_or_else(degenerate)?;
    let n_points = tail.len();
    Ok(if r_lin >= r_sub {
        RateFit {
            model: RateModel::Linear { ratio: sl.exp() },
            r_squared: r_lin,
            r_squared_other: r_sub,
            n_points,
        }
    } else {
        RateFit {
            model: RateModel::Sublinear { exponent: -ss },
            r_squared: r_sub,
            r_squared_other: r_lin,
            n_points,
        }
    })
}

/// [`fit_rate`] on the distances of a trace's recorded iterates to `pstar`.
pub fn fit_convergence_rate(trace: &Trace, pstar: &HdpPoint) -> Result<RateFit> {
    let target = pstar.to_vector();
    let mut iters = Vec::with_capacity(trace.iterates.len());
    let mut dists = Vec::with_capacity(trace.iterates.len());
    for rec in &trace.iterates {
        if rec.point.len() != target.len() {
            return Err(Error::invalid("trace iterates and reference point differ in dimension"));
        }
        iters.push(rec.iter);
        dists.push((DVector::from_column_slice(&rec.point) - &target).norm());
    }
    fit_rate(&iters, &dists)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sequence() {
        let iters: Vec<usize> = (0..200).collect();
        let d: Vec<f64> = iters.iter().map(|&k| 0.9f64.powi(k as i32)).collect();
        let fit = fit_rate(&iters, &d).unwrap();
        let RateModel::Linear { ratio } = fit.model else {
            panic!("{fit:?}")
        };
        assert!((ratio - 0.9).abs() < 1e-6);
        assert!(fit.r_squared > 0.999_999);
    }

    #[test]
    fn power_sequence() {
        let iters: Vec<usize> = (1..5000).collect();
        let d: Vec<f64> = iters.iter().map(|&k| (k as f64).powf(-0.5)).collect();
        let fit = fit_rate(&iters, &d).unwrap();
        let RateModel::Sublinear { exponent } = fit.model else {
            panic!("{fit:?}")
        };
        assert!((exponent - 0.5).abs() < 1e-6);
    }

    #[test]
    fn floor_and_short_tails() {
        let iters: Vec<usize> = (0..30).collect();
        let d = vec![1e-14; 30];
        assert!(fit_rate(&iters, &d).is_err());
        assert!(fit_rate(&[5], &[0.1]).is_err());
    }
}
