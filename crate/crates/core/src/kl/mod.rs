//! Empirical KL exponents, their predicted values, convergence-rate fits and
//! the Hölderian error-bound probe.
//!
//! A KL sample pairs a value gap `g(x) − g(x̄) > 0` with a slope measure
//! (`‖∇F‖`, or a subdifferential distance). Along a power law
//! `slope ≈ c·gapᵅ` the exponent is the log-log slope, which is what
//! [`fit_kl_exponent`] estimates.

mod errorbound;
mod rate;
mod sample;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use errorbound::{
    errorbound_probe, BallSet, ErrorBoundConfig, ErrorBoundProbe, ErrorBoundRow, HingeEpigraph, Segment, Singleton,
    SolutionSet,
};
pub use rate::{fit_convergence_rate, fit_rate, RateFit, RateModel};
pub use sample::{sample_kl_hdp, sample_kl_restricted, SampleMode, SampleSet};

use crate::{io, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlSample {
    pub gap: f64,
    pub slope: f64,
}

/// Log-log least-squares fit of `slope` against `gap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KlFit {
    pub alpha_hat: f64,
    pub log_intercept: f64,
    pub r_squared: f64,
    pub n_samples: usize,
    pub gap_window: (f64, f64),
}

/// Which result a predicted exponent comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredictionSource {
    /// `max{α, ½}` under strict complementarity.
    #[serde(rename = "thm3.7")]
    StrictComplementarity,
    /// `(1 + β)/2` with `β = 1 − γ(1 − α)` under a Hölderian error bound.
    #[serde(rename = "thm3.11")]
    ErrorBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub value: f64,
    pub source: PredictionSource,
}

/// A fit together with the exponent it is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KlReport {
    pub alpha_hat: f64,
    pub log_intercept: f64,
    pub r_squared: f64,
    pub n_samples: usize,
    pub window: (f64, f64),
    pub prediction: Option<f64>,
    pub prediction_source: Option<PredictionSource>,
}

impl KlReport {
    pub fn new(fit: &KlFit, prediction: Option<Prediction>) -> Self {
        Self {
            alpha_hat: fit.alpha_hat,
            log_intercept: fit.log_intercept,
            r_squared: fit.r_squared,
            n_samples: fit.n_samples,
            window: fit.gap_window,
            prediction: prediction.map(|p| p.value),
            prediction_source: prediction.map(|p| p.source),
        }
    }
}

/// KL exponent of `F` predicted from the exponent `α` of `f`.
///
/// With strict complementarity the exponent is `max{α, ½}`; without it,
/// `(1 + β)/2` where `β = 1 − γ(1 − α)` and `γ` is the error-bound exponent.
pub fn predict_exponent(alpha: f64, strict_complementarity: bool, gamma: Option<f64>) -> Result<Prediction> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if strict_complementarity {
        return Ok(Prediction {
            value: alpha.max(0.5),
            source: PredictionSource::StrictComplementarity,
        });
    }
    let gamma = gamma.ok_or_else(|| Error::invalid("gamma is required without strict complementarity"))?;
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    let beta = 1.0 - gamma * (1.0 - alpha);
    Ok(Prediction {
        value: (1.0 + beta) / 2.0,
        source: PredictionSource::ErrorBound,
    })
}

/// Default gap window `[1e-12, 1e-2·(1 + |F*|)]`.
pub fn default_window(reference_value: f64) -> (f64, f64) {
    (1e-12, 1e-2 * (1.0 + reference_value.abs()))
}

/// Ordinary least squares `y ≈ slope·x + intercept`, returning
/// `(slope, intercept, R²)`.
pub(crate) fn ols(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let r2 = if syy > 0.0 {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Some((slope, intercept, r2))
}

pub const MIN_SAMPLES: usize = 10;

/// Fits `log slope = α̂·log gap + c` over samples with gap in `window` and a
/// positive slope.
pub fn fit_kl_exponent(samples: &[KlSample], window: (f64, f64)) -> Result<KlFit> {
    let (lo, hi) = window;
    let kept: Vec<&KlSample> = samples
        .iter()
        .filter(|s| s.gap >= lo && s.gap <= hi && s.slope > 0.0 && s.gap.is_finite() && s.slope.is_finite())
        .collect();
    if kept.len() < MIN_SAMPLES {
        return Err(Error::invalid(format!(
            "{} usable samples in gap window [{lo:e}, {hi:e}], need at least {MIN_SAMPLES}",
            kept.len()
        )));
    }
    let x: Vec<f64> = kept.iter().map(|s| s.gap.ln()).collect();
    let y: Vec<f64> = kept.iter().map(|s| s.slope.ln()).collect();
    let (alpha_hat, log_intercept, r_squared) =
        ols(&x, &y).ok_or_else(|| Error::invalid("all samples share one gap value"))?;
    Ok(KlFit {
        alpha_hat,
        log_intercept,
        r_squared,
        n_samples: kept.len(),
        gap_window: window,
    })
}

/// CSV with columns `gap,slope_measure`.
pub fn write_samples_csv<W: Write>(out: W, samples: &[KlSample], header: bool) -> Result<()> {
    let h: &[&str] = &["gap", "slope_measure"];
    io::write_rows(out, header.then_some(h), samples.iter().map(|s| vec![s.gap, s.slope]))
}
