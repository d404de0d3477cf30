use nalgebra::{DMatrix, DVector};

use super::{all_finite, Loss};
use crate::stationarity::lambda_min;
use crate::{Error, Result};

/// `h(x) = ½xᵀQx + cᵀx + k` with symmetric `Q`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    q: DMatrix<f64>,
    c: DVector<f64>,
    constant: f64,
    convex: bool,
}

impl Quadratic {
    pub fn new(q: DMatrix<f64>, c: DVector<f64>, constant: f64) -> Result<Self> {
        let n = c.len();
        if n == 0 || q.nrows() != n || q.ncols() != n {
            return Err(Error::invalid(format!(
                "quadratic: Q must be {n}x{n}, got {}x{}",
                q.nrows(),
                q.ncols()
            )));
        }
        if !all_finite(q.iter()) || !all_finite(c.iter()) || !constant.is_finite() {
            return Err(Error::invalid("quadratic: non-finite data"));
        }
        let convex = lambda_min(&q)? >= -1e-12 * (1.0 + q.amax());
        Ok(Self { q, c, constant, convex })
    }
}

impl Loss for Quadratic {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.q * x)) + self.c.dot(x) + self.constant
    }

    fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.q * x + &self.c
    }

    fn hess(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        self.q.clone()
    }

    fn is_convex(&self) -> bool {
        self.convex
    }

    fn label(&self) -> String {
        format!("quadratic(n={})", self.c.len())
    }

    fn bregman(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let d = x - y;
        0.5 * d.dot(&(&self.q * &d))
    }

    fn grad_diff(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        &self.q * (x - y)
    }
}
