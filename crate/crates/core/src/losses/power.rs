use nalgebra::{dmatrix, dvector, DMatrix, DVector};

use super::Loss;
use crate::{Error, Result};

/// `h(x) = (1−α)|x|^{1/(1−α)} − x` for `α ∈ [1/2, 1)`.
///
/// Convex and C² on ℝ. At `α = 1/2` this is exactly `½x² − x`. For `α > 1/2`
/// the second derivative vanishes at the origin, so the loss is flat to second
/// order there.
#[derive(Debug, Clone)]
pub struct Power1d {
    alpha: f64,
    p: f64,
}

impl Power1d {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.5..1.0).contains(&alpha) {
            return Err(Error::invalid(format!(
                "power_1d: alpha must lie in [1/2, 1), got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            p: 1.0 / (1.0 - alpha),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn quadratic(&self) -> bool {
        self.p == 2.0
    }

    /// `(1−α)|t|^p`, the nonlinear part.
    fn phi(&self, t: f64) -> f64 {
        if self.quadratic() {
            0.5 * t * t
        } else {
            (1.0 - self.alpha) * t.abs().powf(self.p)
        }
    }

    fn dphi(&self, t: f64) -> f64 {
        if self.quadratic() {
            t
        } else {
            t.signum() * t.abs().powf(self.p - 1.0)
        }
    }

    fn d2phi(&self, t: f64) -> f64 {
        if self.quadratic() {
            1.0
        } else {
            (self.p - 1.0) * t.abs().powf(self.p - 2.0)
        }
    }
}

impl Loss for Power1d {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        self.phi(x[0]) - x[0]
    }

    fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
        let t = x[0];
        let d = if t == 0.0 { 0.0 } else { self.dphi(t) };
        dvector![d - 1.0]
    }

    fn hess(&self, x: &DVector<f64>) -> DMatrix<f64> {
        dmatrix![self.d2phi(x[0])]
    }

    fn is_convex(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        format!("power_1d(alpha={})", self.alpha)
    }

    fn bregman(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let (s, t) = (x[0], y[0]);
        let dt = if t == 0.0 { 0.0 } else { self.dphi(t) };
        self.phi(s) - self.phi(t) - dt * (s - t)
    }

    fn grad_diff(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = |t: f64| if t == 0.0 { 0.0 } else { self.dphi(t) };
        dvector![d(x[0]) - d(y[0])]
    }
}
