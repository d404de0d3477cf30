//! Named experiments with fixed instances and seeds.

use nalgebra::{dmatrix, dvector, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TraceSummary;
use crate::kl::{
    default_window, errorbound_probe, fit_convergence_rate, fit_kl_exponent, predict_exponent, sample_kl_hdp,
    ErrorBoundConfig, ErrorBoundProbe, HingeEpigraph, KlReport, KlSample, RateFit, SampleMode, Segment,
};
use crate::losses::{self, SmoothLoss};
use crate::solvers::{gd_backtracking, newton_polish, prox_gradient, random_init, GdConfig, ProxConfig, Status, Trace};
use crate::stationarity::{
    index_sets, lambda_min, minimizer_gradient_spread, second_order_test, strict_complementarity,
};
use crate::{Error, HdpPoint, L1Problem, Result};

/// Optional parameters shared by the presets; each preset reads the ones it
/// needs and falls back to its own defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PresetParams {
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub seed: Option<u64>,
    /// Number of runs in seed sweeps.
    pub seeds: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PresetInfo {
    pub name: &'static str,
    pub parameters: &'static str,
    pub description: &'static str,
}

pub const CATALOG: &[PresetInfo] = &[
    PresetInfo {
        name: "example-3.8",
        parameters: "alpha (default 0.75)",
        description: "power loss (1−α)|x|^{1/(1−α)} − x, μ = 1: ray-sampled KL exponent of F at the origin",
    },
    PresetInfo {
        name: "example-3.14",
        parameters: "alpha (0.75), gamma (0.5)",
        description: "two-dimensional hinge-power loss: ray-sampled KL exponent of F and error-bound probe",
    },
    PresetInfo {
        name: "lasso-sc",
        parameters: "seed (0)",
        description: "random lasso with strict complementarity: trajectory KL fit and rate fit",
    },
    PresetInfo {
        name: "lasso-nosc",
        parameters: "seed (0)",
        description: "h = ½(x + μ)², μ = 1, where strict complementarity fails: trajectory KL fit and rate fit",
    },
    PresetInfo {
        name: "lasso-degenerate",
        parameters: "seed (0)",
        description: "A = [1 1], y = 1, μ = 0.1: gradient agreement across minimizers and error-bound probe",
    },
    PresetInfo {
        name: "saddle-avoidance",
        parameters: "seed (0), seeds (100)",
        description: "gradient descent from random starts on a lasso whose origin is a strict saddle",
    },
];

pub fn preset_catalog() -> &'static [PresetInfo] {
    CATALOG
}

/// Result of a ray-sampled KL fit.
#[derive(Debug, Clone, Serialize)]
pub struct RayOutcome {
    pub alpha: f64,
    pub gamma: Option<f64>,
    pub strict_complementarity: bool,
    pub kl: KlReport,
    pub discarded: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub errorbound: Option<ErrorBoundProbe>,
    #[serde(skip)]
    pub samples: Vec<KlSample>,
}

/// Ray directions along `a₁` with radii `2^{-k/2}` for `k` in `range`.
fn ray_fit(prob: &L1Problem, ks: std::ops::RangeInclusive<i32>, alpha: f64, gamma: Option<f64>) -> Result<RayOutcome> {
    let n = prob.dim();
    let origin = HdpPoint::zeros(n);
    let mut e1 = DVector::zeros(2 * n);
    e1[0] = 1.0;
    let radii: Vec<f64> = ks.map(|k| 2f64.powf(-0.5 * f64::from(k))).collect();
    let set = sample_kl_hdp(
        prob,
        &origin,
        SampleMode::Ray {
            directions: &[e1],
            radii: &radii,
        },
    )?;
    let fit = fit_kl_exponent(&set.samples, (f64::MIN_POSITIVE, 1.0))?;
    let (sc, _) = strict_complementarity(prob, origin.s(), 1e-12)?;
    let prediction = predict_exponent(alpha, sc, Some(gamma.unwrap_or(1.0)))?;
    Ok(RayOutcome {
        alpha,
        gamma,
        strict_complementarity: sc,
        kl: KlReport::new(&fit, Some(prediction)),
        discarded: set.discarded,
        errorbound: None,
        samples: set.samples,
    })
}

/// Power loss on the real line: along `(t, 0)` the gap and slope of `F`
/// follow exact powers of `t`, so the fit recovers `(1 + α)/2`.
pub fn power_ray(alpha: f64) -> Result<RayOutcome> {
    let prob = L1Problem::new(losses::power_1d(alpha)?, 1.0)?;
    ray_fit(&prob, 8..=40, alpha, None)
}

/// Hinge-power loss in the plane: ray fit along `((t, 0), 0)` plus the
/// error-bound probe for `Ω = {x ≥ 0 : x₂ ≥ x₁^{1/γ}}`.
pub fn hinge_ray(alpha: f64, gamma: f64, seed: u64) -> Result<RayOutcome> {
    let prob = L1Problem::new(losses::hinge_power_2d(alpha, gamma)?, 1.0)?;
    let mut out = ray_fit(&prob, 2..=20, alpha, Some(gamma))?;
    let sstar = DVector::zeros(2);
    let isets = index_sets(&prob, &sstar, 1e-12)?;
    let cfg = ErrorBoundConfig {
        gamma,
        radii: vec![0.2, 0.02, 0.002],
        seed,
        ..Default::default()
    };
    out.errorbound = Some(errorbound_probe(&HingeEpigraph::new(gamma)?, &sstar, &isets, &cfg)?);
    Ok(out)
}

/// Minimizer of `f` for a convex loss: proximal gradient, then a Newton
/// polish on the support.
pub fn solve_f(prob: &L1Problem) -> Result<DVector<f64>> {
    let n = prob.dim();
    let w = DVector::from_element(n, prob.mu());
    let cfg = ProxConfig {
        tol: 1e-12,
        max_iter: 2_000_000,
        ..Default::default()
    };
    let trace = prox_gradient(prob.loss().as_ref(), &w, &DVector::zeros(n), &cfg)?;
    let x = DVector::from_column_slice(trace.final_point());
    Ok(newton_polish(prob.loss().as_ref(), &w, &x, 20))
}

/// Outcome of a trajectory experiment on a lasso instance.
#[derive(Debug, Clone, Serialize)]
pub struct LassoOutcome {
    pub mu: f64,
    pub reference_s: Vec<f64>,
    pub reference_value: f64,
    pub strict_complementarity: bool,
    pub margin: f64,
    pub run: TraceSummary,
    /// `|f(s_final) − f(s*)|`
    pub value_gap: f64,
    pub second_order: bool,
    pub kl: KlReport,
    pub discarded: usize,
    pub rate: RateFit,
    #[serde(skip)]
    pub trace: Trace,
    #[serde(skip)]
    pub samples: Vec<KlSample>,
}

fn trajectory_experiment(
    prob: &L1Problem,
    sstar: &DVector<f64>,
    p0: &HdpPoint,
    gd: &GdConfig,
    alpha_f: f64,
    gamma: f64,
) -> Result<LassoOutcome> {
    let trace = gd_backtracking(prob, p0, gd)?;
    let last = HdpPoint::from_flat(trace.final_point())?;
    let pstar = HdpPoint::lift_like(sstar, &last);
    let f_star = prob.value(sstar);
    let set = sample_kl_hdp(prob, &pstar, SampleMode::Trajectory(&trace))?;
    let fit = fit_kl_exponent(&set.samples, default_window(f_star))?;
    let (sc, margin) = strict_complementarity(prob, sstar, 1e-9)?;
    let prediction = predict_exponent(alpha_f, sc, Some(gamma))?;
    let rate = fit_convergence_rate(&trace, &pstar)?;
    let report = second_order_test(prob, &last, 1e-6);
    Ok(LassoOutcome {
        mu: prob.mu(),
        reference_s: sstar.iter().copied().collect(),
        reference_value: f_star,
        strict_complementarity: sc,
        margin,
        run: TraceSummary::of(&trace),
        value_gap: (prob.value(last.s()) - f_star).abs(),
        second_order: report.second_order == Some(true),
        kl: KlReport::new(&fit, Some(prediction)),
        discarded: set.discarded,
        rate,
        trace,
        samples: set.samples,
    })
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let z: f64 = StandardNormal.sample(rng);
        scale * z
    })
}

/// A random `30 × 10` lasso whose solution satisfies strict complementarity
/// with margin at least `10⁻³` and has a positive definite support Hessian.
pub fn random_sc_lasso(seed: u64) -> Result<(L1Problem, DVector<f64>)> {
    let (m, n) = (30, 10);
    for attempt in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1000).wrapping_add(attempt));
        let a = gaussian(&mut rng, m, n, 1.0 / (m as f64).sqrt());
        let mut x = DVector::zeros(n);
        for i in 0..3 {
            x[i] = (1.0 + rng.random::<f64>()) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        }
        let noise = gaussian(&mut rng, m, 1, 0.01).column(0).into_owned();
        let y = &a * &x + noise;
        let mu = 0.1 * (a.transpose() * &y).amax();
        let prob = L1Problem::new(losses::least_squares(a.clone(), y)?, mu)?;
        let s = solve_f(&prob)?;
        let Ok((true, margin)) = strict_complementarity(&prob, &s, 1e-9) else {
            continue;
        };
        let support: Vec<usize> = (0..n).filter(|&i| s[i] != 0.0).collect();
        let gram = DMatrix::from_fn(support.len(), support.len(), |r, c| {
            a.column(support[r]).dot(&a.column(support[c]))
        });
        if margin >= 1e-3 && !support.is_empty() && lambda_min(&gram)? >= 1e-6 {
            return Ok((prob, s));
        }
    }
    Err(Error::invalid(format!(
        "no strictly complementary instance found for seed {seed}"
    )))
}

/// Trajectory KL fit and rate fit on [`random_sc_lasso`].
pub fn lasso_sc(seed: u64) -> Result<LassoOutcome> {
    let (prob, s) = random_sc_lasso(seed)?;
    let p0 = random_init(prob.dim(), seed, 1.0)?;
    let gd = GdConfig {
        grad_tol: 1e-11,
        max_iter: 200_000,
        ..Default::default()
    };
    trajectory_experiment(&prob, &s, &p0, &gd, 0.5, 1.0)
}

/// `h(x) = ½(x + 1)²`, `μ = 1`: the minimizer is `0` with `∇h(0) = μ`, so
/// strict complementarity fails and `F` decays like `b⁴` along `b`.
pub fn lasso_nosc(seed: u64) -> Result<LassoOutcome> {
    let prob = L1Problem::new(losses::least_squares(dmatrix![1.0], dvector![-1.0])?, 1.0)?;
    let p0 = random_init(1, seed, 1.0)?;
    let gd = GdConfig {
        grad_tol: 1e-14,
        max_iter: 200_000,
        record_every: 50,
        ..Default::default()
    };
    trajectory_experiment(&prob, &DVector::zeros(1), &p0, &gd, 0.5, 1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct DegenerateOutcome {
    pub starts: usize,
    /// Largest `‖∇h(x) − ∇h(y)‖` over the minimizers found.
    pub gradient_spread: f64,
    /// Spread of the minimizers themselves.
    pub minimizer_spread: f64,
    /// Largest `|f(x) − min f|` over the minimizers.
    pub value_spread: f64,
    pub errorbound: ErrorBoundProbe,
    #[serde(skip)]
    pub minimizers: Vec<DVector<f64>>,
}

/// `A = [1 1]`, `y = 1`, `μ = 0.1`: the minimizers form the segment
/// `{x ≥ 0 : x₁ + x₂ = 0.9}`.
pub fn degenerate_problem() -> Result<L1Problem> {
    L1Problem::new(losses::least_squares(dmatrix![1.0, 1.0], dvector![1.0])?, 0.1)
}

pub fn lasso_degenerate(seed: u64) -> Result<DegenerateOutcome> {
    let prob = degenerate_problem()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<DVector<f64>> = (0..20)
        .map(|_| gaussian(&mut rng, 2, 1, 2.0).column(0).into_owned())
        .collect();
    let w = DVector::from_element(2, prob.mu());
    let (gradient_spread, minimizers) =
        minimizer_gradient_spread(prob.loss().as_ref(), &w, &starts, &ProxConfig::default())?;
    let f_min = 0.5 * 0.1f64.powi(2) + 0.1 * 0.9;
    let mut minimizer_spread = 0.0f64;
    for (i, x) in minimizers.iter().enumerate() {
        for y in &minimizers[i + 1..] {
            minimizer_spread = minimizer_spread.max((x - y).norm());
        }
    }
    let value_spread = minimizers
        .iter()
        .map(|x| (prob.value(x) - f_min).abs())
        .fold(0.0, f64::max);
    let sstar = dvector![0.9, 0.0];
    let isets = index_sets(&prob, &sstar, 1e-12)?;
    let omega = Segment {
        p: dvector![0.9, 0.0],
        q: dvector![0.0, 0.9],
    };
    let cfg = ErrorBoundConfig {
        gamma: 1.0,
        radii: vec![0.1, 0.01, 0.001],
        seed,
        ..Default::default()
    };
    Ok(DegenerateOutcome {
        starts: starts.len(),
        gradient_spread,
        minimizer_spread,
        value_spread,
        errorbound: errorbound_probe(&omega, &sstar, &isets, &cfg)?,
        minimizers,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AvoidanceRun {
    pub seed: u64,
    pub status: Status,
    pub iterations: usize,
    pub final_value: f64,
    pub second_order: bool,
    pub value_gap: f64,
    #[serde(skip)]
    pub trace: Trace,
}

#[derive(Debug, Clone, Serialize)]
pub struct AvoidanceOutcome {
    pub mu: f64,
    /// `λ_min(∇²F(0, 0))`
    pub origin_lambda_min: f64,
    pub f_min: f64,
    pub runs: usize,
    pub second_order_runs: usize,
    pub global_runs: usize,
    pub details: Vec<AvoidanceRun>,
}

/// A `20 × 5` lasso with `μ = ½‖Aᵀy‖∞`, so the origin is a strict saddle
/// of `F`.
pub fn saddle_lasso(seed: u64) -> Result<L1Problem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gaussian(&mut rng, 20, 5, 1.0 / 20f64.sqrt());
    let y = gaussian(&mut rng, 20, 1, 1.0).column(0).into_owned();
    let mu = 0.5 * (a.transpose() * &y).amax();
    let loss: SmoothLoss = losses::least_squares(a, y)?;
    L1Problem::new(loss, mu)
}

pub fn saddle_avoidance(seed: u64, seeds: usize) -> Result<AvoidanceOutcome> {
    let prob = saddle_lasso(seed)?;
    let n = prob.dim();
    let f_min = prob.value(&solve_f(&prob)?);
    let gd = GdConfig {
        grad_tol: 1e-10,
        max_iter: 200_000,
        record_every: 100,
        ..Default::default()
    };
    let details = (0..seeds as u64)
        .into_par_iter()
        .map(|k| {
            let run_seed = seed.wrapping_mul(1_000_003).wrapping_add(k);
            let trace = gd_backtracking(&prob, &random_init(n, run_seed, 1.0)?, &gd)?;
            let last = HdpPoint::from_flat(trace.final_point())?;
            Ok(AvoidanceRun {
                seed: run_seed,
                status: trace.status,
                iterations: trace.iterations(),
                final_value: trace.final_value(),
                second_order: second_order_test(&prob, &last, 1e-6).second_order == Some(true),
                value_gap: (prob.value(last.s()) - f_min).abs(),
                trace,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AvoidanceOutcome {
        mu: prob.mu(),
        origin_lambda_min: lambda_min(&prob.hdp_hess(&HdpPoint::zeros(n)))?,
        f_min,
        runs: details.len(),
        second_order_runs: details.iter().filter(|r| r.second_order).count(),
        global_runs: details.iter().filter(|r| r.value_gap <= 1e-7).count(),
        details,
    })
}

/// Artifacts and JSON result of a named preset.
#[derive(Debug, Clone)]
pub struct PresetRun {
    pub result: serde_json::Value,
    pub trace: Option<Trace>,
    pub samples: Vec<KlSample>,
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("preset outcomes serialize")
}

pub fn run_preset(name: &str, params: &PresetParams) -> Result<PresetRun> {
    let seed = params.seed.unwrap_or(0);
    let run = match name {
        "example-3.8" => {
            let out = power_ray(params.alpha.unwrap_or(0.75))?;
            PresetRun {
                result: to_value(&out),
                trace: None,
                samples: out.samples,
            }
        }
        "example-3.14" => {
            let out = hinge_ray(params.alpha.unwrap_or(0.75), params.gamma.unwrap_or(0.5), seed)?;
            PresetRun {
                result: to_value(&out),
                trace: None,
                samples: out.samples,
            }
        }
        "lasso-sc" | "lasso-nosc" => {
            let out = if name == "lasso-sc" {
                lasso_sc(seed)?
            } else {
                lasso_nosc(seed)?
            };
            PresetRun {
                result: to_value(&out),
                trace: Some(out.trace),
                samples: out.samples,
            }
        }
        "lasso-degenerate" => PresetRun {
            result: to_value(&lasso_degenerate(seed)?),
            trace: None,
            samples: vec![],
        },
        "saddle-avoidance" => PresetRun {
            result: to_value(&saddle_avoidance(seed, params.seeds.unwrap_or(100))?),
            trace: None,
            samples: vec![],
        },
        other => {
            let known: Vec<&str> = CATALOG.iter().map(|p| p.name).collect();
            return Err(Error::Config(format!(
                "unknown preset {other:?}; known presets: {}",
                known.join(", ")
            )));
        }
    };
    Ok(run)
}
