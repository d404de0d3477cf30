use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{all_finite, Loss};
use crate::{Error, Result};

/// Outcome of comparing analytic derivatives with central differences.
#[derive(Debug, Clone, Serialize)]
pub struct DerivReport {
    pub step: f64,
    /// `‖∇h − D_fd h‖∞ / max(1, ‖∇h‖∞)`
    pub grad_rel_err: f64,
    /// `‖∇²h − D_fd ∇h‖∞ / max(1, ‖∇²h‖∞)`
    pub hess_rel_err: f64,
    /// largest `|H_ij − H_ji|`
    pub hess_asymmetry: f64,
    /// The analytic Hessian is numerically singular at the point.
    pub near_singular_hessian: bool,
}

/// `1e-5·(1+‖x‖)`.
pub fn default_step(x: &DVector<f64>) -> f64 {
    1e-5 * (1.0 + x.norm())
}

fn scaled_err(a: impl Iterator<Item = f64>, scale: f64) -> f64 {
    a.fold(0.0, |m: f64, v| m.max(v.abs())) / scale.max(1.0)
}

/// Central-difference check of `grad` against `value` and of `hess` against `grad`.
pub fn check_derivatives(loss: &dyn Loss, x: &DVector<f64>, step: Option<f64>) -> Result<DerivReport> {
    let n = loss.dim();
    if x.len() != n {
        return Err(Error::invalid(format!(
            "point has length {}, loss expects {n}",
            x.len()
        )));
    }
    let step = step.unwrap_or_else(|| default_step(x));
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid(format!("step must be positive, got {step}")));
    }

    let value = |z: &DVector<f64>| -> Result<f64> {
        let v = loss.value(z);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::non_finite("value", z))
        }
    };
    let grad = |z: &DVector<f64>| -> Result<DVector<f64>> {
        let g = loss.grad(z);
        if all_finite(g.iter()) {
            Ok(g)
        } else {
            Err(Error::non_finite("gradient", z))
        }
    };

    let g = grad(x)?;
    let h = loss.hess(x);
    if !all_finite(h.iter()) {
        return Err(Error::non_finite("hessian", x));
    }

    let mut fd_g = DVector::zeros(n);
    let mut fd_h = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += step;
        xm[j] -= step;
        fd_g[j] = (value(&xp)? - value(&xm)?) / (2.0 * step);
        let col = (grad(&xp)? - grad(&xm)?) / (2.0 * step);
        fd_h.set_column(j, &col);
    }

    let grad_rel_err = scaled_err((&g - &fd_g).iter().copied(), g.amax());
    let hess_rel_err = scaled_err((&h - &fd_h).iter().copied(), h.amax());
    let hess_asymmetry = (&h - h.transpose()).amax();
    let sym = (&h + h.transpose()) * 0.5;
    let smallest = sym
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let near_singular_hessian = smallest <= 1e-10 * (1.0 + h.amax());

    Ok(DerivReport {
        step,
        grad_rel_err,
        hess_rel_err,
        hess_asymmetry,
        near_singular_hessian,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses;
    use nalgebra::dvector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn least_squares_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = DMatrix::from_fn(5, 3, |_, _| rng.random_range(-1.0..1.0));
        let y = DVector::from_fn(5, |_, _| rng.random_range(-1.0..1.0));
        let h = losses::least_squares(a, y).unwrap();
        for _ in 0..20 {
            let x = DVector::from_fn(3, |_, _| rng.random_range(-2.0..2.0));
            let r = check_derivatives(h.as_ref(), &x, None).unwrap();
            assert!(r.grad_rel_err <= 1e-6 && r.hess_rel_err <= 1e-6, "{r:?}");
        }
    }

    #[test]
    fn logistic_origin() {
        let rows = nalgebra::dmatrix![1.0, -2.0; 0.5, 0.5; -1.0, 3.0];
        let h = losses::logistic(rows).unwrap();
        let r = check_derivatives(h.as_ref(), &dvector![0.0, 0.0], None).unwrap();
        assert!(r.grad_rel_err <= 1e-6 && r.hess_rel_err <= 1e-6, "{r:?}");
    }

    #[test]
    fn power_origin_flags_singular_hessian() {
        let h = losses::power_1d(0.95).unwrap();
        let r = check_derivatives(h.as_ref(), &dvector![0.0], None).unwrap();
        assert!(r.near_singular_hessian);
        let r = check_derivatives(h.as_ref(), &dvector![0.7], None).unwrap();
        assert!(!r.near_singular_hessian);
    }

    #[derive(Debug)]
    struct Blowup;
    impl Loss for Blowup {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &DVector<f64>) -> f64 {
            1.0 / x[0]
        }
        fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
            dvector![-1.0 / (x[0] * x[0])]
        }
        fn hess(&self, x: &DVector<f64>) -> DMatrix<f64> {
            nalgebra::dmatrix![2.0 / x[0].powi(3)]
        }
        fn is_convex(&self) -> bool {
            false
        }
        fn label(&self) -> String {
            "blowup".into()
        }
    }

    #[test]
    fn non_finite_reports_point() {
        match check_derivatives(&Blowup, &dvector![0.0], None) {
            Err(Error::Evaluation { point, .. }) => assert_eq!(point, vec![0.0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_step() {
        let h = losses::power_1d(0.5).unwrap();
        assert!(check_derivatives(h.as_ref(), &dvector![1.0], Some(0.0)).is_err());
    }
}
