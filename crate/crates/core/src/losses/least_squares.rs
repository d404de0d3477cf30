use nalgebra::{DMatrix, DVector};

use super::{all_finite, Loss};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct LeastSquares {
    a: DMatrix<f64>,
    y: DVector<f64>,
    gram: DMatrix<f64>,
}

impl LeastSquares {
    pub fn new(a: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::invalid("least squares: A must be nonempty"));
        }
        if a.nrows() != y.len() {
            return Err(Error::invalid(format!(
                "least squares: A has {} rows but y has length {}",
                a.nrows(),
                y.len()
            )));
        }
        if !all_finite(a.iter()) || !all_finite(y.iter()) {
            return Err(Error::invalid("least squares: non-finite data"));
        }
        let gram = a.transpose() * &a;
        Ok(Self { a, y, gram })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn target(&self) -> &DVector<f64> {
        &self.y
    }
}

impl Loss for LeastSquares {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * (&self.a * x - &self.y).norm_squared()
    }

    fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
        self.a.tr_mul(&(&self.a * x - &self.y))
    }

    fn hess(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        self.gram.clone()
    }

    fn is_convex(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        format!("least_squares({}x{})", self.a.nrows(), self.a.ncols())
    }

    fn bregman(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        0.5 * (&self.a * (x - y)).norm_squared()
    }

    fn grad_diff(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        &self.gram * (x - y)
    }
}
