//! Stationarity of `f` and `F`: index sets, critical cones, strict
//! complementarity, second-order tests and strict-saddle margins.

mod enumerate;
mod report;
mod saddle;
mod sets;

use nalgebra::{DMatrix, DVector};

pub use enumerate::{enumerate_stationary, EnumerateConfig};
pub use report::{classify, second_order_test, CaseTag, StationarityReport};
pub use saddle::{minimizer_gradient_spread, saddle_margin_bruteforce, SaddleMargin, SaddleMarginConfig, SubsetMargin};
pub use sets::{critical_cone, index_sets, strict_complementarity, ConeDescriptor, ConeTag, IndexSets};

use crate::{Error, Result};

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::invalid(format!(
            "matrix is {}x{}, not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let asym = (m - m.transpose()).amax();
    if asym > 1e-10 * (1.0 + m.amax()) {
        return Err(Error::invalid(format!(
            "matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    Ok(())
}

/// Smallest eigenvalue of a symmetric matrix.
///
/// Backed by a dense symmetric eigendecomposition (Householder
/// tridiagonalization followed by implicit QR). An empty matrix has
/// `λ_min = +∞`.
pub fn lambda_min(m: &DMatrix<f64>) -> Result<f64> {
    Ok(min_eigenpair(m)?.0)
}

/// Smallest eigenvalue with a unit eigenvector.
pub fn min_eigenpair(m: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    check_symmetric(m)?;
    if m.nrows() == 0 {
        return Ok((f64::INFINITY, DVector::zeros(0)));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let (idx, &val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty");
    Ok((val, eig.eigenvectors.column(idx).into_owned()))
}
