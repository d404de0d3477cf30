use nalgebra::{dmatrix, dvector, DMatrix, DVector};

use super::Loss;
use crate::{Error, Result};

/// `h(x) = (1−α)(|x₁|^{1/γ} − x₂)₊^{1/(1−α)} − x₁ − x₂`
/// with `α ∈ (1/2, 1)` and `γ ∈ (0, 1/2]`.
///
/// The hinge `w = (|x₁|^{1/γ} − x₂)₊` is evaluated on its inactive branch when
/// `w = 0`, so value, gradient and Hessian are all continuous across the
/// boundary.
#[derive(Debug, Clone)]
pub struct HingePower2d {
    alpha: f64,
    gamma: f64,
    /// 1/(1−α)
    p: f64,
    /// 1/γ
    q: f64,
}

struct Parts {
    w: f64,
    /// ∂w/∂x₁ on the active branch
    dw1: f64,
    /// ∂²w/∂x₁² on the active branch
    d2w1: f64,
}

impl HingePower2d {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.5 && alpha < 1.0) {
            return Err(Error::invalid(format!(
                "hinge_power_2d: alpha must lie in (1/2, 1), got {alpha}"
            )));
        }
        if !(gamma > 0.0 && gamma <= 0.5) {
            return Err(Error::invalid(format!(
                "hinge_power_2d: gamma must lie in (0, 1/2], got {gamma}"
            )));
        }
        Ok(Self {
            alpha,
            gamma,
            p: 1.0 / (1.0 - alpha),
            q: 1.0 / gamma,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn parts(&self, x: &DVector<f64>) -> Parts {
        let (x1, x2) = (x[0], x[1]);
        let ax = x1.abs();
        let m = ax.powf(self.q) - x2;
        let w = m.max(0.0);
        let dw1 = if ax == 0.0 {
            0.0
        } else {
            self.q * x1.signum() * ax.powf(self.q - 1.0)
        };
        let d2w1 = self.q * (self.q - 1.0) * ax.powf(self.q - 2.0);
        Parts { w, dw1, d2w1 }
    }

    /// (1−α)wᵖ
    fn phi(&self, x: &DVector<f64>) -> f64 {
        let w = self.parts(x).w;
        if w == 0.0 {
            0.0
        } else {
            (1.0 - self.alpha) * w.powf(self.p)
        }
    }

    fn dphi(&self, x: &DVector<f64>) -> DVector<f64> {
        let Parts { w, dw1, .. } = self.parts(x);
        if w == 0.0 {
            return dvector![0.0, 0.0];
        }
        let r = w.powf(self.p - 1.0);
        dvector![r * dw1, -r]
    }
}

impl Loss for HingePower2d {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        self.phi(x) - x[0] - x[1]
    }

    fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
        self.dphi(x).add_scalar(-1.0)
    }

    fn hess(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let Parts { w, dw1, d2w1 } = self.parts(x);
        if w == 0.0 {
            return DMatrix::zeros(2, 2);
        }
        let r = self.p - 1.0;
        let wr1 = r * w.powf(r - 1.0);
        let wr = w.powf(r);
        let h11 = wr1 * dw1 * dw1 + wr * d2w1;
        let h12 = -wr1 * dw1;
        let h22 = wr1;
        dmatrix![h11, h12; h12, h22]
    }

    fn is_convex(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        format!("hinge_power_2d(alpha={}, gamma={})", self.alpha, self.gamma)
    }

    fn bregman(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.phi(x) - self.phi(y) - self.dphi(y).dot(&(x - y))
    }

    fn grad_diff(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.dphi(x) - self.dphi(y)
    }
}
