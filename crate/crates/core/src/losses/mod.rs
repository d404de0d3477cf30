//! C² loss functions `h` behind a single evaluable contract.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

mod check;
mod config;
mod flipped;
mod hinge;
mod least_squares;
mod logistic;
mod power;
mod quadratic;

pub use check::{check_derivatives, default_step, DerivReport};
pub use config::{LossSpec, MatrixSource, VectorSource};
pub use flipped::Flipped;
pub use hinge::HingePower2d;
pub use least_squares::LeastSquares;
pub use logistic::Logistic;
pub use power::Power1d;
pub use quadratic::Quadratic;

/// A twice continuously differentiable function `h: ℝⁿ → ℝ`.
///
/// Implementations are immutable once built, so a loss may be evaluated from
/// several threads at once.
pub trait Loss: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn value(&self, x: &DVector<f64>) -> f64;

    fn grad(&self, x: &DVector<f64>) -> DVector<f64>;

    /// Dense symmetric Hessian.
    fn hess(&self, x: &DVector<f64>) -> DMatrix<f64>;

    fn is_convex(&self) -> bool;

    fn label(&self) -> String;

    /// Bregman divergence `h(x) − h(y) − ⟨∇h(y), x − y⟩`.
    ///
    /// Losses with an affine part override this so the affine terms cancel
    /// exactly instead of through floating-point subtraction. Value gaps near
    /// a minimizer depend on it.
    fn bregman(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.value(x) - self.value(y) - self.grad(y).dot(&(x - y))
    }

    /// `∇h(x) − ∇h(y)`, overridden where constant gradient terms cancel.
    fn grad_diff(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.grad(x) - self.grad(y)
    }
}

/// Shared handle to a loss.
pub type SmoothLoss = Arc<dyn Loss>;

/// `h(x) = ½‖Ax − y‖²`.
pub fn least_squares(a: DMatrix<f64>, y: DVector<f64>) -> crate::Result<SmoothLoss> {
    Ok(Arc::new(LeastSquares::new(a, y)?))
}

/// `h(x) = (1/m) Σ log(1 + exp⟨yᵢ, x⟩)` with the rows of `rows` as the `yᵢ`.
pub fn logistic(rows: DMatrix<f64>) -> crate::Result<SmoothLoss> {
    Ok(Arc::new(Logistic::new(rows)?))
}

/// `h(x) = (1−α)|x|^{1/(1−α)} − x` on ℝ.
pub fn power_1d(alpha: f64) -> crate::Result<SmoothLoss> {
    Ok(Arc::new(Power1d::new(alpha)?))
}

/// `h(x) = (1−α)(|x₁|^{1/γ} − x₂)₊^{1/(1−α)} − x₁ − x₂` on ℝ².
pub fn hinge_power_2d(alpha: f64, gamma: f64) -> crate::Result<SmoothLoss> {
    Ok(Arc::new(HingePower2d::new(alpha, gamma)?))
}

/// `h(x) = ½xᵀQx + cᵀx + k`.
pub fn quadratic(q: DMatrix<f64>, c: DVector<f64>, constant: f64) -> crate::Result<SmoothLoss> {
    Ok(Arc::new(Quadratic::new(q, c, constant)?))
}

pub(crate) fn all_finite<'a>(it: impl IntoIterator<Item = &'a f64>) -> bool {
    it.into_iter().all(|v| v.is_finite())
}
