//! Finite-difference check of a logistic loss and of its lifted objective `F`.

use hadamard_l1::losses::{self, check_derivatives};
use hadamard_l1::L1Problem;
use nalgebra::{dmatrix, dvector};

fn main() -> hadamard_l1::Result<()> {
    let rows = dmatrix![1.0, -2.0, 0.5; 0.5, 0.5, -1.0; -1.0, 3.0, 0.2];
    let h = losses::logistic(rows)?;
    let x = dvector![0.3, -0.2, 0.7];
    let r = check_derivatives(h.as_ref(), &x, None)?;
    println!(
        "h = {}: gradient error {:.2e}, Hessian error {:.2e}",
        h.label(),
        r.grad_rel_err,
        r.hess_rel_err
    );

    let lifted = L1Problem::new(h, 0.1)?.lifted();
    let ab = dvector![0.3, -0.2, 0.7, 0.1, 0.4, -0.5];
    let r = check_derivatives(lifted.as_ref(), &ab, None)?;
    println!(
        "{}: gradient error {:.2e}, Hessian error {:.2e}",
        lifted.label(),
        r.grad_rel_err,
        r.hess_rel_err
    );
    Ok(())
}
