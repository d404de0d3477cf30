use std::sync::OnceLock;

use hadamard_l1::kl::{fit_kl_exponent, predict_exponent, KlSample};
use hadamard_l1::losses::{self, check_derivatives, SmoothLoss};
use hadamard_l1::model::{reduce, uv_to_ab, Block, ReductionMap};
use hadamard_l1::solvers::{gd_backtracking, ista, random_init, GdConfig};
use hadamard_l1::stationarity::{
    critical_cone, enumerate_stationary, index_sets, second_order_test, strict_complementarity, ConeDescriptor,
    ConeTag, EnumerateConfig,
};
use hadamard_l1::{HdpPoint, L1Problem};
use nalgebra::{dmatrix, DVector};
use proptest::prelude::*;

fn vector(n: usize, r: f64) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-r..r, n).prop_map(DVector::from_vec)
}

fn lasso() -> L1Problem {
    let a = dmatrix![1.0, 0.5, -0.3; 0.2, 1.0, 0.4; -0.6, 0.1, 1.0; 0.3, -0.8, 0.2];
    let y = nalgebra::dvector![1.0, -0.5, 0.8, 0.3];
    let mu = 0.3 * (a.transpose() * &y).amax();
    L1Problem::new(losses::least_squares(a, y).unwrap(), mu).unwrap()
}

fn zoo() -> &'static [(SmoothLoss, f64)] {
    static ZOO: OnceLock<Vec<(SmoothLoss, f64)>> = OnceLock::new();
    ZOO.get_or_init(|| {
        let rows = dmatrix![1.0, -2.0, 0.5; 0.5, 0.5, -1.0; -1.0, 3.0, 0.2; 0.3, 0.1, 0.9];
        let m = dmatrix![2.0, 0.5, 0.0; 0.5, 1.0, 0.3; 0.0, 0.3, 1.5];
        vec![
            (lasso().loss().clone(), lasso().mu()),
            (losses::logistic(rows).unwrap(), 0.1),
            (
                losses::quadratic(m, nalgebra::dvector![1.0, -1.0, 0.5], 0.0).unwrap(),
                0.5,
            ),
            (losses::power_1d(0.7).unwrap(), 1.0),
            (losses::hinge_power_2d(0.8, 0.4).unwrap(), 1.0),
        ]
    })
}

/// Stationary points of `F` for [`lasso`], with every sign variant reachable.
fn stationary() -> &'static (L1Problem, Vec<HdpPoint>) {
    static PTS: OnceLock<(L1Problem, Vec<HdpPoint>)> = OnceLock::new();
    PTS.get_or_init(|| {
        let prob = lasso();
        let pts = enumerate_stationary(&prob, &EnumerateConfig::default()).unwrap();
        (prob, pts)
    })
}

fn sign_variant(p: &HdpPoint, mask: u32) -> HdpPoint {
    let n = p.dim();
    let mut a = p.a().clone();
    let mut b = p.b().clone();
    for i in 0..n {
        if mask >> (2 * i) & 1 == 1 {
            a[i] = -a[i];
        }
        if mask >> (2 * i + 1) & 1 == 1 {
            b[i] = -b[i];
        }
    }
    HdpPoint::new(a, b).unwrap()
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn loss_gradients_match_differences(k in 0usize..5, seed in vector(3, 2.0)) {
        let (h, _) = &zoo()[k];
        let x = DVector::from_iterator(h.dim(), seed.iter().copied().take(h.dim()));
        let r = check_derivatives(h.as_ref(), &x, None).unwrap();
        prop_assert!(r.grad_rel_err <= 1e-5, "{r:?}");
        prop_assert!(r.hess_asymmetry <= 1e-12);
    }

    #[test]
    fn lifted_derivatives_match_differences(k in 0usize..5, seed in vector(6, 1.5)) {
        let (h, mu) = &zoo()[k];
        let lifted = L1Problem::new(h.clone(), *mu).unwrap().lifted();
        let x = DVector::from_iterator(lifted.dim(), seed.iter().copied().take(lifted.dim()));
        let r = check_derivatives(lifted.as_ref(), &x, None).unwrap();
        prop_assert!(r.grad_rel_err <= 1e-5 && r.hess_rel_err <= 1e-4, "{r:?}");
    }

    #[test]
    fn convex_midpoints(k in 0usize..4, x in vector(3, 2.0), y in vector(3, 2.0)) {
        let (h, _) = &zoo()[k];
        prop_assume!(h.is_convex());
        let n = h.dim();
        let x = DVector::from_iterator(n, x.iter().copied().take(n));
        let y = DVector::from_iterator(n, y.iter().copied().take(n));
        let mid = (&x + &y) * 0.5;
        prop_assert!(h.value(&mid) <= 0.5 * (h.value(&x) + h.value(&y)) + 1e-12);
    }

    #[test]
    fn point_caches_difference_of_squares(a in vector(4, 3.0), b in vector(4, 3.0)) {
        let p = HdpPoint::new(a.clone(), b.clone()).unwrap();
        let s = a.component_mul(&a) - b.component_mul(&b);
        prop_assert_eq!(p.s(), &s);
    }

    #[test]
    fn objective_identities(a in vector(3, 2.0), b in vector(3, 2.0), u in vector(3, 2.0), v in vector(3, 2.0)) {
        let prob = lasso();
        let p = HdpPoint::new(a, b).unwrap();
        let mins: f64 = p.a().iter().zip(p.b().iter()).map(|(a, b)| (a * a).min(b * b)).sum();
        let lhs = prob.hdp_value(&p) - prob.value(p.s());
        prop_assert!((lhs - 2.0 * prob.mu() * mins).abs() <= 1e-12 * prob.hdp_value(&p).max(1.0));
        let g = prob.product_value(&u, &v);
        prop_assert!(rel(g, prob.hdp_value(&uv_to_ab(&u, &v).unwrap())) <= 1e-12);
        prop_assert!(g >= prob.value(&u.component_mul(&v)) - 1e-12);
    }

    #[test]
    fn reduction_maps_invert(tags in prop::collection::vec(0u8..4, 1..6), a in vector(5, 2.0), b in vector(5, 2.0)) {
        let n = tags.len();
        let blocks = tags.iter().map(|t| [Block::Keep, Block::Swap, Block::NegateA, Block::SwapNegate][*t as usize]).collect();
        let map = ReductionMap::new(blocks);
        let p = HdpPoint::new(a.rows(0, n).into_owned(), b.rows(0, n).into_owned()).unwrap();
        prop_assert_eq!(map.inverse(&map.forward(&p)), p.clone());
        prop_assert_eq!(map.flip(&map.flip(p.s())), p.s().clone());
        // s transforms through P
        let q = map.forward(&p);
        prop_assert_eq!(q.s(), &map.flip(p.s()));
        let covered: usize = [Block::Keep, Block::Swap, Block::NegateA, Block::SwapNegate].iter().map(|&k| map.indices(k).len()).sum();
        prop_assert_eq!(covered, n);
    }

    #[test]
    fn cone_projection_is_a_member(tags in prop::collection::vec(0u8..4, 1..8), d in vector(8, 5.0)) {
        let cone = ConeDescriptor {
            tags: tags.iter().map(|t| [ConeTag::Zero, ConeTag::Free, ConeTag::Nonneg, ConeTag::Nonpos][*t as usize]).collect(),
        };
        let d = d.rows(0, tags.len()).into_owned();
        let pd = cone.project(&d);
        prop_assert!(cone.contains(&pd, 0.0));
        prop_assert_eq!(cone.project(&pd), pd.clone());
        // projection residual is orthogonal to the projection
        prop_assert!((d - &pd).dot(&pd).abs() <= 1e-12);
    }

    #[test]
    fn reduce_preserves_value_gradient_and_margin(k in 0usize..64, mask in 0u32..64) {
        let (prob, pts) = stationary();
        let p = sign_variant(&pts[k % pts.len()], mask);
        let red = reduce(prob, &p, 1e-8).unwrap();
        let q = &red.point;
        prop_assert!(rel(red.problem.hdp_value(q), prob.hdp_value(&p)) <= 1e-12);
        prop_assert!((red.problem.hdp_grad(q).norm() - prob.hdp_grad(&p).norm()).abs() <= 1e-12);
        prop_assert!(q.a().min() >= -1e-8 && q.b().norm() <= 1e-8);
        // the margin is defined at stationary points of f only
        prop_assume!(prob.subdiff_dist_tol(p.s(), 1e-8) <= 1e-8);
        let (sc, margin) = strict_complementarity(prob, p.s(), 1e-8).unwrap();
        let (sc_r, margin_r) = strict_complementarity(&red.problem, q.s(), 1e-8).unwrap();
        prop_assert_eq!(sc, sc_r);
        prop_assert!((margin - margin_r).abs() <= 1e-12 || margin == margin_r);
    }

    #[test]
    fn stationary_points_are_well_formed(k in 0usize..64, mask in 0u32..64) {
        let (prob, pts) = stationary();
        let p = sign_variant(&pts[k % pts.len()], mask);
        prop_assert!(p.min_ab_product() <= 1e-8);
        let r = second_order_test(prob, &p, 1e-8);
        if r.second_order == Some(true) {
            prop_assert!(r.f_subdiff_dist <= 1e-8 && r.support_hessian_psd == Some(true));
        }
        prop_assume!(r.f_subdiff_dist <= 1e-8);
        let sets = index_sets(prob, p.s(), 1e-8).unwrap();
        let mut all: Vec<usize> = [&sets.j1, &sets.j2, &sets.j31, &sets.j32].iter().flat_map(|s| s.iter().copied()).collect();
        all.sort();
        prop_assert_eq!(all, (0..prob.dim()).collect::<Vec<_>>());
        let g = prob.loss().grad(p.s());
        for &i in &sets.j2 {
            prop_assert!((g[i].abs() - prob.mu()).abs() <= 1e-8);
        }
        let cone = critical_cone(&sets);
        prop_assert_eq!(cone.dim(), prob.dim());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn descent_trace_contracts(seed in 0u64..1000, scale in 0.1f64..2.0) {
        let prob = lasso();
        let p0 = random_init(prob.dim(), seed, scale).unwrap();
        let trace = gd_backtracking(&prob, &p0, &GdConfig { grad_tol: 1e-10, ..Default::default() }).unwrap();
        for k in 0..trace.iterations() {
            let drop = 0.5 * trace.stepsizes[k].powi(2) * trace.grad_norms[k].powi(2);
            prop_assert!(trace.decreases[k] <= -drop);
            prop_assert!(trace.values[k + 1] <= trace.values[k] + 1e-14);
            prop_assert!(trace.stepsizes[k + 1] <= trace.stepsizes[k]);
        }
        // agrees with ISTA on the convex problem
        let x = DVector::from_column_slice(ista(&prob, &DVector::zeros(3), 0.3, 200_000, 1e-12).unwrap().final_point());
        let s = HdpPoint::from_flat(trace.final_point()).unwrap();
        prop_assert!((prob.value(s.s()) - prob.value(&x)).abs() <= 1e-7);
    }

    #[test]
    fn kl_fit_recovers_power_laws(theta in 0.3f64..0.99, c in -3.0f64..3.0) {
        let samples: Vec<KlSample> = (0..40)
            .map(|k| {
                let gap = 10f64.powf(-1.0 - 0.25 * f64::from(k));
                KlSample { gap, slope: c.exp() * gap.powf(theta) }
            })
            .collect();
        let fit = fit_kl_exponent(&samples, (1e-12, 1.0)).unwrap();
        prop_assert!((fit.alpha_hat - theta).abs() <= 1e-10);
        prop_assert!((fit.log_intercept - c).abs() <= 1e-8);
    }

    #[test]
    fn predictions_are_consistent(alpha in 0.5f64..0.999) {
        let sc = predict_exponent(alpha, true, None).unwrap().value;
        let nosc = predict_exponent(alpha, false, Some(1.0)).unwrap().value;
        prop_assert!((nosc - sc - (1.0 - alpha) / 2.0).abs() <= 1e-12);
    }
}

#[test]
fn half_power_is_the_quadratic() {
    let h = losses::power_1d(0.5).unwrap();
    for k in -40..=40 {
        let x = DVector::from_element(1, 0.1 * f64::from(k));
        let t = x[0];
        assert!((h.value(&x) - (0.5 * t * t - t)).abs() <= 1e-15);
    }
}

#[test]
fn lasso_stationary_set_is_nontrivial() {
    let (prob, pts) = stationary();
    assert!(pts.len() > 1);
    let second: Vec<_> = pts
        .iter()
        .filter(|p| second_order_test(prob, p, 1e-8).second_order == Some(true))
        .collect();
    assert_eq!(second.len(), 1);
}
