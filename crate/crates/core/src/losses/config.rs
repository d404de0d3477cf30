use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::SmoothLoss;
use crate::{io, Result};

/// Matrix payload: inline nested arrays or a path to a headerless CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    Inline(Vec<Vec<f64>>),
    Csv(PathBuf),
}

/// Vector payload: inline array or a CSV file holding one row or one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorSource {
    Inline(Vec<f64>),
    Csv(PathBuf),
}

impl MatrixSource {
    pub fn load(&self, base: &Path) -> Result<DMatrix<f64>> {
        match self {
            MatrixSource::Inline(rows) => io::rows_to_matrix(rows),
            MatrixSource::Csv(p) => io::read_matrix(&base.join(p)),
        }
    }
}

impl VectorSource {
    pub fn load(&self, base: &Path) -> Result<DVector<f64>> {
        match self {
            VectorSource::Inline(v) => Ok(DVector::from_column_slice(v)),
            VectorSource::Csv(p) => io::read_vector(&base.join(p)),
        }
    }
}

/// Declarative description of a loss, as found in experiment configs.
///
/// ```
/// use hadamard_l1::losses::LossSpec;
/// let spec: LossSpec = toml::from_str(r#"
///     kind = "least_squares"
///     A = [[1.0, 1.0]]
///     y = [1.0]
/// "#).unwrap();
/// let h = spec.build(std::path::Path::new(".")).unwrap();
/// assert_eq!(h.dim(), 2);
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum LossSpec {
    #[serde(rename = "least_squares")]
    LeastSquares {
        #[serde(rename = "A")]
        a: MatrixSource,
        y: VectorSource,
    },
    /// Rows of `Y` are the samples `yᵢ`.
    #[serde(rename = "logistic")]
    Logistic {
        #[serde(rename = "Y")]
        rows: MatrixSource,
    },
    #[serde(rename = "power_1d")]
    Power1d { alpha: f64 },
    #[serde(rename = "hinge_power_2d")]
    HingePower2d { alpha: f64, gamma: f64 },
    #[serde(rename = "quadratic")]
    Quadratic {
        #[serde(rename = "Q")]
        q: MatrixSource,
        c: VectorSource,
        #[serde(default)]
        constant: f64,
    },
}

impl LossSpec {
    /// Build the loss, resolving relative CSV paths against `base`.
    pub fn build(&self, base: &Path) -> Result<SmoothLoss> {
        match self {
            LossSpec::LeastSquares { a, y } => super::least_squares(a.load(base)?, y.load(base)?),
            LossSpec::Logistic { rows } => super::logistic(rows.load(base)?),
            LossSpec::Power1d { alpha } => super::power_1d(*alpha),
            LossSpec::HingePower2d { alpha, gamma } => super::hinge_power_2d(*alpha, *gamma),
            LossSpec::Quadratic { q, c, constant } => super::quadratic(q.load(base)?, c.load(base)?, *constant),
        }
    }
}
