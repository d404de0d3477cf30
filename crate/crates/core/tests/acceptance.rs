//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.
//!
//! Built with `harness = false` so the report is printed on every run.

use std::time::{Duration, Instant};

use hadamard_l1::experiment::{hinge_ray, lasso_degenerate, lasso_nosc, lasso_sc, power_ray, saddle_avoidance};
use hadamard_l1::kl::RateModel;
use hadamard_l1::losses::{self, check_derivatives, SmoothLoss};
use hadamard_l1::model::uv_to_ab;
use hadamard_l1::solvers::{ista, Trace};
use hadamard_l1::stationarity::{
    enumerate_stationary, lambda_min, saddle_margin_bruteforce, second_order_test, EnumerateConfig, SaddleMarginConfig,
};
use hadamard_l1::{HdpPoint, L1Problem};
use nalgebra::{dvector, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn uniform(rng: &mut ChaCha8Rng, n: usize, r: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-r..r))
}

fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

fn derivative_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = uniform_matrix(&mut rng, 25, 20);
    let y = uniform(&mut rng, 25, 1.0);
    let rows = uniform_matrix(&mut rng, 30, 10);
    let m = uniform_matrix(&mut rng, 6, 6);
    let q = m.transpose() * &m;
    let c = uniform(&mut rng, 6, 1.0);
    let zoo: Vec<(SmoothLoss, f64)> = vec![
        (losses::least_squares(a.clone(), y.clone()).unwrap(), 0.3),
        (losses::logistic(rows.clone()).unwrap(), 0.05),
        (losses::power_1d(0.75).unwrap(), 1.0),
        (losses::power_1d(0.5).unwrap(), 1.0),
        (losses::hinge_power_2d(0.75, 0.5).unwrap(), 1.0),
        (losses::hinge_power_2d(0.9, 0.25).unwrap(), 1.0),
        (losses::quadratic(q, c, 0.5).unwrap(), 0.2),
    ];
    let (mut worst_g, mut worst_h, mut checked) = (0.0f64, 0.0f64, 0);
    for (h, mu) in &zoo {
        let lifted = L1Problem::new(h.clone(), *mu).unwrap().lifted();
        for loss in [h.as_ref(), lifted.as_ref()] {
            for _ in 0..100 {
                let x = uniform(&mut rng, loss.dim(), 1.5);
                let r = check_derivatives(loss, &x, None).unwrap();
                worst_g = worst_g.max(r.grad_rel_err);
                worst_h = worst_h.max(r.hess_rel_err);
                checked += 1;
            }
        }
    }
    outcome(
        worst_g <= 1e-5 && worst_h <= 1e-4,
        format!("{checked} points, worst gradient error {worst_g:.1e}, worst Hessian error {worst_h:.1e}"),
    )
}

fn model_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = uniform_matrix(&mut rng, 8, 5);
    let y = uniform(&mut rng, 8, 1.0);
    let mu = 0.4;
    let prob = L1Problem::new(losses::least_squares(a, y).unwrap(), mu).unwrap();
    let (mut worst_min, mut worst_uv) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let p = HdpPoint::new(uniform(&mut rng, 5, 2.0), uniform(&mut rng, 5, 2.0)).unwrap();
        let lhs = prob.hdp_value(&p) - prob.value(p.s());
        let rhs: f64 = 2.0
            * mu
            * p.a()
                .iter()
                .zip(p.b().iter())
                .map(|(a, b)| (a * a).min(b * b))
                .sum::<f64>();
        worst_min = worst_min.max((lhs - rhs).abs() / prob.hdp_value(&p).abs().max(1.0));
        let (u, v) = (uniform(&mut rng, 5, 2.0), uniform(&mut rng, 5, 2.0));
        let g = prob.product_value(&u, &v);
        let f = prob.hdp_value(&uv_to_ab(&u, &v).unwrap());
        worst_uv = worst_uv.max((g - f).abs() / g.abs().max(1.0));
    }
    outcome(
        worst_min <= 1e-12 && worst_uv <= 1e-12,
        format!("min-identity error {worst_min:.1e}, G-vs-F error {worst_uv:.1e}"),
    )
}

fn power_exponent() -> Outcome {
    let mut pass = true;
    let mut parts = vec![];
    for alpha in [0.6, 0.75, 0.9] {
        let prob = L1Problem::new(losses::power_1d(alpha).unwrap(), 1.0).unwrap();
        let origin = HdpPoint::zeros(1);
        // closed form along (t, 0): ‖∇F‖ = 2((1/(1−α))F)^{(1+α)/2}
        let mut closed = 0.0f64;
        for t in [0.9, 0.5, 0.1, 0.03] {
            let p = HdpPoint::new(dvector![t], dvector![0.0]).unwrap();
            let fv = prob.hdp_gap(&p, &origin);
            let expect = 2.0 * (fv / (1.0 - alpha)).powf((1.0 + alpha) / 2.0);
            closed = closed.max((prob.hdp_grad_anchored(&p, &origin).norm() - expect).abs() / expect);
        }
        let fit = power_ray(alpha).unwrap().kl;
        let target = (1.0 + alpha) / 2.0;
        let ok = (fit.alpha_hat - target).abs() <= 1e-3
            && closed <= 1e-10
            && (fit.prediction.unwrap() - target).abs() <= 1e-12;
        pass &= ok;
        parts.push(format!(
            "α={alpha}: {:.6} vs {target} (closed form {closed:.1e})",
            fit.alpha_hat
        ));
    }
    outcome(pass, parts.join(", "))
}

fn hinge_exponent() -> Outcome {
    let mut pass = true;
    let mut parts = vec![];
    for (alpha, gamma) in [(0.75, 0.5), (0.9, 0.25)] {
        let prob = L1Problem::new(losses::hinge_power_2d(alpha, gamma).unwrap(), 1.0).unwrap();
        // along ((t, 0), 0): F = (1−α)t^{2p/γ}, ∇F = 2t·(1/γ)t^{2(p−1)/γ}t^{2(1/γ−1)} e₁
        let (p, q) = (1.0 / (1.0 - alpha), 1.0 / gamma);
        let origin = HdpPoint::zeros(2);
        let mut closed = 0.0f64;
        for t in [0.8, 0.5, 0.2] {
            let pt = HdpPoint::new(dvector![t, 0.0], dvector![0.0, 0.0]).unwrap();
            let fv = (1.0 - alpha) * t.powf(2.0 * p * q);
            let gv = 2.0 * t * q * t.powf(2.0 * q * (p - 1.0)) * t.powf(2.0 * (q - 1.0));
            let fe = (prob.hdp_gap(&pt, &origin) - fv).abs() / fv;
            let ge = (prob.hdp_grad_anchored(&pt, &origin).norm() - gv).abs() / gv;
            closed = closed.max(fe).max(ge);
        }
        let fit = hinge_ray(alpha, gamma, 3).unwrap().kl;
        let target = (2.0 - gamma * (1.0 - alpha)) / 2.0;
        let ok = (fit.alpha_hat - target).abs() <= 1e-3 && closed <= 1e-10;
        pass &= ok;
        parts.push(format!(
            "(α,γ)=({alpha},{gamma}): {:.6} vs {target} (closed form {closed:.1e})",
            fit.alpha_hat
        ));
    }
    outcome(pass, parts.join(", "))
}

fn exponent_dichotomy() -> Outcome {
    let sc = lasso_sc(0).unwrap();
    let nosc = lasso_nosc(0).unwrap();
    let sc_ok = (0.45..=0.60).contains(&sc.kl.alpha_hat) && sc.kl.prediction == Some(0.5) && sc.strict_complementarity;
    let nosc_ok =
        (0.65..=0.85).contains(&nosc.kl.alpha_hat) && nosc.kl.prediction == Some(0.75) && !nosc.strict_complementarity;
    outcome(
        sc_ok && nosc_ok,
        format!(
            "strictly complementary {:.4} (pred 0.5), degenerate dual {:.4} (pred 0.75)",
            sc.kl.alpha_hat, nosc.kl.alpha_hat
        ),
    )
}

fn rates() -> Outcome {
    let sc = lasso_sc(0).unwrap();
    let nosc = lasso_nosc(0).unwrap();
    let sc_ok = matches!(sc.rate.model, RateModel::Linear { ratio } if ratio < 1.0) && sc.rate.r_squared >= 0.95;
    let nosc_ok = matches!(nosc.rate.model, RateModel::Sublinear { exponent } if (exponent - 0.5).abs() <= 0.2);
    outcome(
        sc_ok && nosc_ok,
        format!(
            "strictly complementary {:?} (R² {:.4}), degenerate dual {:?}",
            sc.rate.model, sc.rate.r_squared, nosc.rate.model
        ),
    )
}

fn random_small_lasso(seed: u64) -> L1Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
    let a = uniform_matrix(&mut rng, 6, 3);
    let y = uniform(&mut rng, 6, 1.0);
    let mu = 0.3 * (a.transpose() * &y).amax();
    L1Problem::new(losses::least_squares(a, y).unwrap(), mu).unwrap()
}

struct Enumerated {
    prob: L1Problem,
    points: Vec<HdpPoint>,
    f_min: f64,
    delta: f64,
}

fn enumerate_instances() -> Vec<Enumerated> {
    (0..5)
        .map(|seed| {
            let prob = random_small_lasso(seed);
            let points = enumerate_stationary(&prob, &EnumerateConfig::default()).unwrap();
            let lip = prob.loss().hess(&DVector::zeros(3)).symmetric_eigenvalues().max();
            let trace = ista(&prob, &DVector::zeros(3), 1.0 / lip, 1_000_000, 1e-13).unwrap();
            let f_min = prob.value(&DVector::from_column_slice(trace.final_point()));
            let delta = saddle_margin_bruteforce(&prob, &SaddleMarginConfig::default())
                .unwrap()
                .delta;
            Enumerated {
                prob,
                points,
                f_min,
                delta,
            }
        })
        .collect()
}

fn strict_saddle() -> Outcome {
    let mut pass = true;
    let (mut minima, mut saddles, mut total) = (0, 0, 0);
    for inst in enumerate_instances() {
        for p in &inst.points {
            total += 1;
            let r = second_order_test(&inst.prob, p, 1e-7);
            let global = (inst.prob.value(p.s()) - inst.f_min).abs() <= 1e-8;
            let lam = lambda_min(&inst.prob.hdp_hess(p)).unwrap();
            if r.second_order == Some(true) && global {
                minima += 1;
            } else if lam <= -inst.delta + 1e-6 {
                saddles += 1;
            } else {
                pass = false;
            }
        }
    }
    outcome(
        pass,
        format!("{total} stationary points: {minima} global minima, {saddles} strict saddles"),
    )
}

fn hessian_equivalence() -> Outcome {
    let (mut agree, mut total) = (0, 0);
    for inst in enumerate_instances() {
        for p in &inst.points {
            total += 1;
            let r = second_order_test(&inst.prob, p, 1e-7);
            if r.verdicts_agree() == Some(true) {
                agree += 1;
            }
        }
    }
    outcome(total > 0 && agree == total, format!("{agree}/{total} verdicts agree"))
}

fn gradient_invariance() -> Outcome {
    let out = lasso_degenerate(0).unwrap();
    let on_segment = out
        .minimizers
        .iter()
        .all(|x| x.min() >= -1e-10 && (x.sum() - 0.9).abs() <= 1e-8);
    outcome(
        out.starts == 20 && on_segment && out.minimizer_spread > 0.1 && out.gradient_spread <= 1e-8,
        format!(
            "{} minimizers spread {:.3}, ∇h spread {:.1e}",
            out.starts, out.minimizer_spread, out.gradient_spread
        ),
    )
}

fn check_contraction(trace: &Trace, label: &str) -> Result<(), String> {
    let k = trace.iterations();
    for i in 0..k {
        let drop = 0.5 * trace.stepsizes[i].powi(2) * trace.grad_norms[i].powi(2);
        if trace.decreases[i].is_nan() || trace.decreases[i] > -drop {
            return Err(format!("{label}: step {i} fails the decrease test"));
        }
        let slack = 4.0 * f64::EPSILON * trace.values[i].abs().max(1.0);
        if trace.values[i + 1] > trace.values[i] + slack {
            return Err(format!("{label}: value increased at step {i}"));
        }
        if trace.stepsizes[i + 1] > trace.stepsizes[i] {
            return Err(format!("{label}: stepsize increased at step {i}"));
        }
    }
    let tail = &trace.stepsizes[k - k / 4..];
    if tail.iter().any(|&t| t != tail[0]) {
        return Err(format!("{label}: stepsize not constant on the tail"));
    }
    Ok(())
}

fn algorithm_contracts() -> Outcome {
    let sc = lasso_sc(0).unwrap();
    let nosc = lasso_nosc(0).unwrap();
    let avoid = saddle_avoidance(0, 20).unwrap();
    let mut runs = vec![
        (sc.trace, "strictly complementary".to_string()),
        (nosc.trace, "degenerate dual".to_string()),
    ];
    runs.extend(
        avoid
            .details
            .into_iter()
            .map(|r| (r.trace, format!("saddle seed {}", r.seed))),
    );
    let mut backtracks = 0;
    for (trace, label) in &runs {
        if let Err(e) = check_contraction(trace, label) {
            return outcome(false, e);
        }
        backtracks += trace.backtrack_count;
    }
    outcome(true, format!("{} runs, {backtracks} backtracks in total", runs.len()))
}

fn saddle_escape() -> Outcome {
    let out = saddle_avoidance(0, 100).unwrap();
    outcome(
        out.runs == 100 && out.second_order_runs >= 99 && out.origin_lambda_min < 0.0,
        format!(
            "{}/{} second-order, {} global, λ_min at origin {:.3}",
            out.second_order_runs, out.runs, out.global_runs, out.origin_lambda_min
        ),
    )
}

fn error_bound() -> Outcome {
    let hinge = hinge_ray(0.75, 0.5, 3).unwrap().errorbound.unwrap();
    let lasso = lasso_degenerate(0).unwrap().errorbound;
    let ok = |p: &hadamard_l1::kl::ErrorBoundProbe| {
        p.worst_ratio.is_finite() && p.spread < 2.0 && p.rows.len() == 3 && p.rows[0].radius / p.rows[2].radius >= 100.0
    };
    outcome(
        ok(&hinge) && ok(&lasso),
        format!(
            "hinge worst {:.3} spread {:.3}; polyhedral worst {:.3} spread {:.3}",
            hinge.worst_ratio, hinge.spread, lasso.worst_ratio, lasso.spread
        ),
    )
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "derivative consistency",
            budget: Some(Duration::from_secs(5)),
            run: derivative_consistency,
        },
        Criterion {
            id: 2,
            name: "model identities",
            budget: Some(Duration::from_secs(1)),
            run: model_identities,
        },
        Criterion {
            id: 3,
            name: "power-loss KL exponent",
            budget: Some(Duration::from_secs(1)),
            run: power_exponent,
        },
        Criterion {
            id: 4,
            name: "hinge-loss KL exponent",
            budget: Some(Duration::from_secs(1)),
            run: hinge_exponent,
        },
        Criterion {
            id: 5,
            name: "exponent dichotomy",
            budget: Some(Duration::from_secs(30)),
            run: exponent_dichotomy,
        },
        Criterion {
            id: 6,
            name: "convergence rates",
            budget: Some(Duration::from_secs(30)),
            run: rates,
        },
        Criterion {
            id: 7,
            name: "strict saddle property",
            budget: Some(Duration::from_secs(60)),
            run: strict_saddle,
        },
        Criterion {
            id: 8,
            name: "second-order verdict equivalence",
            budget: None,
            run: hessian_equivalence,
        },
        Criterion {
            id: 9,
            name: "gradient invariance on the solution set",
            budget: None,
            run: gradient_invariance,
        },
        Criterion {
            id: 10,
            name: "descent contracts",
            budget: None,
            run: algorithm_contracts,
        },
        Criterion {
            id: 11,
            name: "saddle avoidance",
            budget: Some(Duration::from_secs(60)),
            run: saddle_escape,
        },
        Criterion {
            id: 12,
            name: "error-bound probe",
            budget: None,
            run: error_bound,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let out = (c.run)();
        let took = start.elapsed();
        let in_time = c.budget.is_none_or(|b| took <= b);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = c.budget.map(|b| format!(" / {:.0?}", b)).unwrap_or_default();
        println!(
            "{} [{:>2}] {}: {} ({:.2?}{budget})",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            out.detail,
            took
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
