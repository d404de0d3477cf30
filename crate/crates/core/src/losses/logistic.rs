use nalgebra::{DMatrix, DVector};

use super::{all_finite, Loss};
use crate::{Error, Result};

/// Mean logistic loss over the rows `yᵢ` of a data matrix.
#[derive(Debug, Clone)]
pub struct Logistic {
    rows: DMatrix<f64>,
}

/// `log(1 + eᵗ)` without overflow.
pub(crate) fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl Logistic {
    pub fn new(rows: DMatrix<f64>) -> Result<Self> {
        if rows.nrows() == 0 || rows.ncols() == 0 {
            return Err(Error::invalid("logistic: need at least one nonempty row"));
        }
        if !all_finite(rows.iter()) {
            return Err(Error::invalid("logistic: non-finite data"));
        }
        Ok(Self { rows })
    }

    fn margins(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.rows * x
    }
}

impl Loss for Logistic {
    fn dim(&self) -> usize {
        self.rows.ncols()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let m = self.rows.nrows() as f64;
        self.margins(x).iter().map(|&t| softplus(t)).sum::<f64>() / m
    }

    fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
        let m = self.rows.nrows() as f64;
        let w = self.margins(x).map(sigmoid);
        self.rows.tr_mul(&w) / m
    }

    fn hess(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let m = self.rows.nrows() as f64;
        let weights = self.margins(x).map(|t| {
            let s = sigmoid(t);
            s * (1.0 - s)
        });
        let mut scaled = self.rows.clone();
        for (mut row, w) in scaled.row_iter_mut().zip(weights.iter()) {
            row *= *w;
        }
        let mut h = self.rows.tr_mul(&scaled) / m;
        // force exact symmetry
        let ht = h.transpose();
        h += ht;
        h *= 0.5;
        h
    }

    fn is_convex(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        format!("logistic({}x{})", self.rows.nrows(), self.rows.ncols())
    }
}
