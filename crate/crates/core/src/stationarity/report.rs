use nalgebra::DMatrix;
use serde::Serialize;

use super::lambda_min;
use super::sets::{index_sets, strict_complementarity, IndexSets};
use crate::{HdpPoint, L1Problem};

/// Which alternative of the first-order characterization holds at an index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    /// `aᵢ = bᵢ = 0`
    BothZero,
    /// `aᵢ = 0` and `∇h(s)ᵢ = μ`
    AZeroGradMu,
    /// `bᵢ = 0` and `∇h(s)ᵢ = −μ`
    BZeroGradNegmu,
    None,
}

/// Stationarity summary of a point `(a, b)` and of `s = a² − b²`.
///
/// Index sets and strict complementarity are only filled when `s` is
/// f-stationary within `tol`. The second-order fields are filled by
/// [`second_order_test`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarityReport {
    pub tol: f64,
    #[serde(rename = "grad_norm_F")]
    pub grad_norm: f64,
    pub case_tags: Vec<CaseTag>,
    pub min_ab_product: f64,
    pub f_subdiff_dist: f64,
    #[serde(flatten)]
    pub index_sets: Option<IndexSets>,
    pub strict_complementarity: Option<bool>,
    pub margin: Option<f64>,
    /// Smallest eigenvalue of `∇²F(a, b)`.
    pub lambda_min: f64,
    /// Smallest eigenvalue of `∇²h(s)` restricted to the support.
    pub support_lambda_min: Option<f64>,
    pub support_hessian_psd: Option<bool>,
    /// Verdict from the reduced conditions on `s`.
    pub second_order: Option<bool>,
    /// Verdict from `∇F = 0` and `λ_min(∇²F) ≥ −tol`.
    pub hessian_second_order: Option<bool>,
}

impl StationarityReport {
    pub fn is_first_order(&self) -> bool {
        self.grad_norm <= self.tol
    }

    /// Whether the two second-order verdicts coincide.
    pub fn verdicts_agree(&self) -> Option<bool> {
        Some(self.second_order? == self.hessian_second_order?)
    }
}

fn symmetric_lambda_min(m: &DMatrix<f64>) -> f64 {
    lambda_min(&((m + m.transpose()) * 0.5)).unwrap_or(f64::NAN)
}

/// Tags each index by the first-order alternative it satisfies within `tol`
/// and collects the f-side diagnostics.
pub fn classify(prob: &L1Problem, p: &HdpPoint, tol: f64) -> StationarityReport {
    let g = prob.loss().grad(p.s());
    let mu = prob.mu();
    let case_tags = (0..p.dim())
        .map(|i| {
            let (a, b) = (p.a()[i], p.b()[i]);
            if a.abs() <= tol && b.abs() <= tol {
                CaseTag::BothZero
            } else if a.abs() <= tol && (g[i] - mu).abs() <= tol {
                CaseTag::AZeroGradMu
            } else if b.abs() <= tol && (g[i] + mu).abs() <= tol {
                CaseTag::BZeroGradNegmu
            } else {
                CaseTag::None
            }
        })
        .collect();
    let index_sets = index_sets(prob, p.s(), tol).ok();
    let sc = strict_complementarity(prob, p.s(), tol).ok();
    StationarityReport {
        tol,
        grad_norm: prob.hdp_grad(p).norm(),
        case_tags,
        min_ab_product: p.min_ab_product(),
        f_subdiff_dist: prob.subdiff_dist_tol(p.s(), tol),
        index_sets,
        strict_complementarity: sc.map(|x| x.0),
        margin: sc.map(|x| x.1),
        lambda_min: symmetric_lambda_min(&prob.hdp_hess(p)),
        support_lambda_min: None,
        support_hessian_psd: None,
        second_order: None,
        hessian_second_order: None,
    }
}

/// Second-order stationarity, decided two ways.
///
/// `second_order` requires `‖∇F‖ ≤ tol`, `‖min{a², b²}‖∞ ≤ tol`,
/// `dist(0, ∂f(s)) ≤ tol` and `λ_min(∇²h(s)_II) ≥ −tol` on the support
/// `I = {i : |sᵢ| > tol}`. `hessian_second_order` requires `‖∇F‖ ≤ tol` and
/// `λ_min(∇²F) ≥ −tol`. The two agree at stationary points.
pub fn second_order_test(prob: &L1Problem, p: &HdpPoint, tol: f64) -> StationarityReport {
    let mut report = classify(prob, p, tol);
    let support: Vec<usize> = (0..p.dim()).filter(|&i| p.s()[i].abs() > tol).collect();
    let h = prob.loss().hess(p.s());
    let hs = DMatrix::from_fn(support.len(), support.len(), |r, c| h[(support[r], support[c])]);
    let support_lambda = symmetric_lambda_min(&hs);
    let psd = support_lambda >= -tol;
    let first = report.is_first_order();
    report.support_lambda_min = Some(support_lambda);
    report.support_hessian_psd = Some(psd);
    report.second_order = Some(first && report.min_ab_product <= tol && report.f_subdiff_dist <= tol && psd);
    report.hessian_second_order = Some(first && report.lambda_min >= -tol);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses;
    use crate::solvers::ista;
    use nalgebra::{dmatrix, dvector, DVector};

    fn shifted(c: f64) -> L1Problem {
        L1Problem::new(losses::least_squares(dmatrix![1.0], dvector![c]).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn origin_interior_dual() {
        let r = classify(&shifted(0.5), &HdpPoint::zeros(1), 1e-8);
        assert_eq!(r.case_tags, vec![CaseTag::BothZero]);
        assert!(r.is_first_order());
        assert_eq!(r.strict_complementarity, Some(true));
    }

    #[test]
    fn support_point() {
        let p = HdpPoint::new(dvector![1.0], dvector![0.0]).unwrap();
        let r = second_order_test(&shifted(2.0), &p, 1e-10);
        assert_eq!(r.case_tags, vec![CaseTag::BZeroGradNegmu]);
        assert_eq!(r.grad_norm, 0.0);
        assert_eq!(r.second_order, Some(true));
        assert_eq!(r.hessian_second_order, Some(true));
        let json = serde_json::to_value(&r).unwrap();
        for key in [
            "grad_norm_F",
            "case_tags",
            "J1",
            "J2",
            "J31",
            "J32",
            "strict_complementarity",
            "margin",
            "lambda_min",
            "second_order",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["case_tags"][0], "b_zero_grad_negmu");
    }

    #[test]
    fn non_stationary_point() {
        let p = HdpPoint::new(dvector![0.3, -0.7], dvector![0.2, 0.1]).unwrap();
        let prob = L1Problem::new(
            losses::least_squares(dmatrix![1.0, 2.0; 0.5, -1.0], dvector![1.0, 3.0]).unwrap(),
            0.2,
        )
        .unwrap();
        let r = classify(&prob, &p, 1e-8);
        assert!(r.grad_norm > 0.0);
        assert!(r.case_tags.contains(&CaseTag::None));
        assert!(r.index_sets.is_none());
    }

    #[test]
    fn saddle_at_origin() {
        // |∇h(0)| = 3 > μ = 1
        let r = second_order_test(&shifted(3.0), &HdpPoint::zeros(1), 1e-8);
        assert!(r.is_first_order());
        assert!(r.lambda_min <= -2.0 * (3.0 - 1.0) + 1e-12);
        assert_eq!(r.second_order, Some(false));
        assert_eq!(r.verdicts_agree(), Some(true));
    }

    #[test]
    fn lifted_lasso_solution() {
        let a = dmatrix![1.0, 0.2, 0.0; 0.1, 1.0, 0.3; 0.0, 0.4, 1.0; 0.5, 0.0, 0.2];
        let prob = L1Problem::new(losses::least_squares(a, dvector![1.0, -2.0, 0.05, 0.3]).unwrap(), 0.3).unwrap();
        let t = ista(&prob, &DVector::zeros(3), 0.4, 200_000, 1e-13).unwrap();
        let s = DVector::from_column_slice(t.final_point());
        let r = second_order_test(&prob, &HdpPoint::lift(&s), 1e-7);
        assert_eq!(r.second_order, Some(true));
        assert!(r.lambda_min >= -1e-7);
    }
}
