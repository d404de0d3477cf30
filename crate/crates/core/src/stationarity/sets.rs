use nalgebra::DVector;
use serde::Serialize;

use crate::{Error, L1Problem, Result};

/// Partition of `[n]` at an f-stationary point `s*` (0-based indices).
///
/// * `J1`: `s*ᵢ = 0`, `∇h(s*)ᵢ ∈ (−μ, μ)`
/// * `J2`: `s*ᵢ ≠ 0`
/// * `J31`: `s*ᵢ = 0`, `∇h(s*)ᵢ = −μ`
/// * `J32`: `s*ᵢ = 0`, `∇h(s*)ᵢ = μ`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexSets {
    #[serde(rename = "J1")]
    pub j1: Vec<usize>,
    #[serde(rename = "J2")]
    pub j2: Vec<usize>,
    #[serde(rename = "J31")]
    pub j31: Vec<usize>,
    #[serde(rename = "J32")]
    pub j32: Vec<usize>,
}

impl IndexSets {
    pub fn dim(&self) -> usize {
        self.j1.len() + self.j2.len() + self.j31.len() + self.j32.len()
    }

    /// `J3 = J31 ∪ J32`, sorted.
    pub fn j3(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.j31.iter().chain(&self.j32).copied().collect();
        v.sort_unstable();
        v
    }

    /// Support `{i : s*ᵢ ≠ 0}`, which equals `J2`.
    pub fn support(&self) -> &[usize] {
        &self.j2
    }
}

fn require_stationary(prob: &L1Problem, s: &DVector<f64>, tol: f64) -> Result<()> {
    if s.len() != prob.dim() {
        return Err(Error::invalid(format!(
            "point has length {}, problem has dimension {}",
            s.len(),
            prob.dim()
        )));
    }
    let residual = prob.subdiff_dist_tol(s, tol);
    if residual.is_nan() || residual > tol {
        return Err(Error::NotStationary { residual, tol });
    }
    Ok(())
}

/// Index sets at `s`, with every equality tested to within `tol`.
pub fn index_sets(prob: &L1Problem, s: &DVector<f64>, tol: f64) -> Result<IndexSets> {
    require_stationary(prob, s, tol)?;
    let g = prob.loss().grad(s);
    let mu = prob.mu();
    let mut sets = IndexSets {
        j1: vec![],
        j2: vec![],
        j31: vec![],
        j32: vec![],
    };
    for i in 0..s.len() {
        if s[i].abs() > tol {
            sets.j2.push(i);
        } else if (g[i] + mu).abs() <= tol {
            sets.j31.push(i);
        } else if (g[i] - mu).abs() <= tol {
            sets.j32.push(i);
        } else {
            sets.j1.push(i);
        }
    }
    Ok(sets)
}

/// Strict complementarity at an f-stationary `s`, with its margin
/// `min (μ − |∇h(s)ᵢ|)` over the zero coordinates (`+∞` with full support).
pub fn strict_complementarity(prob: &L1Problem, s: &DVector<f64>, tol: f64) -> Result<(bool, f64)> {
    require_stationary(prob, s, tol)?;
    let g = prob.loss().grad(s);
    let margin = (0..s.len())
        .filter(|&i| s[i].abs() <= tol)
        .map(|i| prob.mu() - g[i].abs())
        .fold(f64::INFINITY, f64::min);
    Ok((margin >= tol, margin))
}

/// Per-coordinate factor of the critical cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeTag {
    Zero,
    Free,
    Nonneg,
    Nonpos,
}

/// The critical cone `K`, a product of `{0}`, `ℝ`, `ℝ₊` and `ℝ₋`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeDescriptor {
    pub tags: Vec<ConeTag>,
}

pub fn critical_cone(isets: &IndexSets) -> ConeDescriptor {
    let mut tags = vec![ConeTag::Zero; isets.dim()];
    for (set, tag) in [
        (&isets.j2, ConeTag::Free),
        (&isets.j31, ConeTag::Nonneg),
        (&isets.j32, ConeTag::Nonpos),
    ] {
        for &i in set {
            tags[i] = tag;
        }
    }
    ConeDescriptor { tags }
}

impl ConeDescriptor {
    pub fn dim(&self) -> usize {
        self.tags.len()
    }

    /// Whether `d ∈ K` up to `tol` per coordinate.
    pub fn contains(&self, d: &DVector<f64>, tol: f64) -> bool {
        d.len() == self.dim()
            && self.tags.iter().zip(d.iter()).all(|(t, &v)| match t {
                ConeTag::Zero => v.abs() <= tol,
                ConeTag::Free => v.is_finite(),
                ConeTag::Nonneg => v >= -tol,
                ConeTag::Nonpos => v <= tol,
            })
    }

    /// Euclidean projection onto `K`.
    pub fn project(&self, d: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(d.len(), |i, _| match self.tags[i] {
            ConeTag::Zero => 0.0,
            ConeTag::Free => d[i],
            ConeTag::Nonneg => d[i].max(0.0),
            ConeTag::Nonpos => d[i].min(0.0),
        })
    }

    /// Projection of `x` onto `s* + K`.
    pub fn project_point(&self, x: &DVector<f64>, sstar: &DVector<f64>) -> DVector<f64> {
        sstar + self.project(&(x - sstar))
    }
}
