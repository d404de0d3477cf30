use nalgebra::{DMatrix, DVector};

use super::{Loss, SmoothLoss};

/// `t ↦ h(Pt)` where `P` flips the sign of selected coordinates.
///
/// `P` is an involution, so the wrapped loss has gradient `P∇h(Pt)` and
/// Hessian `P∇²h(Pt)P`.
#[derive(Debug, Clone)]
pub struct Flipped {
    inner: SmoothLoss,
    signs: DVector<f64>,
}

impl Flipped {
    /// `signs[i]` is `-1.0` where coordinate `i` is flipped and `1.0` elsewhere.
    pub fn new(inner: SmoothLoss, flip: &[bool]) -> Self {
        assert_eq!(inner.dim(), flip.len());
        let signs = DVector::from_iterator(flip.len(), flip.iter().map(|&f| if f { -1.0 } else { 1.0 }));
        Self { inner, signs }
    }

    pub fn signs(&self) -> &DVector<f64> {
        &self.signs
    }

    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        x.component_mul(&self.signs)
    }
}

impl Loss for Flipped {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        self.inner.value(&self.apply(x))
    }

    fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
        self.apply(&self.inner.grad(&self.apply(x)))
    }

    fn hess(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut h = self.inner.hess(&self.apply(x));
        let n = h.nrows();
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] *= self.signs[i] * self.signs[j];
            }
        }
        h
    }

    fn is_convex(&self) -> bool {
        self.inner.is_convex()
    }

    fn label(&self) -> String {
        format!("flipped({})", self.inner.label())
    }

    fn bregman(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.inner.bregman(&self.apply(x), &self.apply(y))
    }

    fn grad_diff(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.apply(&self.inner.grad_diff(&self.apply(x), &self.apply(y)))
    }
}
