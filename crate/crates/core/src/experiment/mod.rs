//! Config-driven experiments: one action per run, a JSON report and CSV
//! artifacts.
//!
//! A config is a TOML document:
//!
//! ```
//! use hadamard_l1::experiment::{run, Action, ExperimentConfig, RunContext};
//!
//! let cfg: ExperimentConfig = toml::from_str(r#"
//!     action = "solve"
//!
//!     [problem]
//!     mu = 1.0
//!     loss = { kind = "least_squares", A = [[1.0]], y = [2.0] }
//!
//!     [init]
//!     point = [2.0, 1.0]
//! "#).unwrap();
//! let report = run(&cfg, &RunContext::default()).unwrap();
//! assert_eq!(report.action, Action::Solve);
//! assert!((report.result["f_value"].as_f64().unwrap() - 1.5).abs() < 1e-8);
//! ```

mod presets;

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use presets::{
    degenerate_problem, hinge_ray, lasso_degenerate, lasso_nosc, lasso_sc, power_ray, preset_catalog, random_sc_lasso,
    run_preset, saddle_avoidance, saddle_lasso, solve_f, AvoidanceOutcome, AvoidanceRun, DegenerateOutcome,
    LassoOutcome, PresetInfo, PresetParams, PresetRun, RayOutcome,
};

use crate::kl::{
    default_window, fit_convergence_rate, fit_kl_exponent, predict_exponent, sample_kl_hdp, write_samples_csv,
    KlReport, KlSample, SampleMode,
};
use crate::losses::{check_derivatives, DerivReport, LossSpec};
use crate::model::reduce;
use crate::solvers::{gd_backtracking, random_init, GdConfig, Status, Trace};
use crate::stationarity::{saddle_margin_bruteforce, second_order_test, strict_complementarity, SaddleMarginConfig};
use crate::{io, Error, HdpPoint, L1Problem, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Solve,
    Classify,
    KlFit,
    RateFit,
    SaddleMargin,
    CheckGrad,
    Preset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub mu: f64,
    pub loss: LossSpec,
}

impl ProblemConfig {
    pub fn build(&self, base: &Path) -> Result<L1Problem> {
        L1Problem::new(self.loss.build(base)?, self.mu)
    }
}

/// Starting point of gradient descent: `point` as a flat `[a; b]`, or a
/// seeded Gaussian draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitConfig {
    pub seed: u64,
    pub scale: f64,
    pub point: Option<Vec<f64>>,
}

impl Default for InitConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            scale: 1.0,
            point: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    Ray,
    Ball,
    Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub mode: SamplingMode,
    pub radius: f64,
    pub count: usize,
    pub seed: u64,
    /// Ray radii; defaults to `radius·2^{-k}`, `k < count`.
    pub radii: Option<Vec<f64>>,
    /// Flat ray directions; defaults to the coordinate directions.
    pub directions: Option<Vec<Vec<f64>>>,
    /// Gap window; defaults to `[1e-12, 1e-2·(1 + |F*|)]`.
    pub window: Option<[f64; 2]>,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            mode: SamplingMode::Trajectory,
            radius: 0.1,
            count: 200,
            seed: 0,
            radii: None,
            directions: None,
            window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Zero and equality tolerance of the stationarity tests.
    pub tol: f64,
    /// Point to classify, as a flat `[a; b]`.
    pub point: Option<Vec<f64>>,
    /// Reference minimizer `s*` for KL and rate fits; computed by proximal
    /// gradient when absent and the loss is convex.
    pub reference: Option<Vec<f64>>,
    /// KL exponent of `f` at the reference, used for the prediction.
    pub alpha: Option<f64>,
    /// Error-bound exponent, used when strict complementarity fails.
    pub gamma: Option<f64>,
    pub n_max: usize,
    /// Random points for the derivative check.
    pub check_points: usize,
    pub check_radius: f64,
    pub fd_step: Option<f64>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            point: None,
            reference: None,
            alpha: None,
            gamma: None,
            n_max: 10,
            check_points: 100,
            check_radius: 2.0,
            fd_step: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetConfig {
    pub name: String,
    #[serde(flatten)]
    pub params: PresetParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// Write a header row in CSV files.
    pub header: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            header: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub action: Option<Action>,
    pub problem: Option<ProblemConfig>,
    #[serde(default)]
    pub solver: GdConfig,
    #[serde(default)]
    pub init: InitConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    pub preset: Option<PresetConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Replaces every seed in the config.
    pub fn override_seed(&mut self, seed: u64) {
        self.init.seed = seed;
        self.sampling.seed = seed;
        if let Some(p) = &mut self.preset {
            p.params.seed = Some(seed);
        }
    }
}

/// Where relative data paths resolve and where artifacts go.
#[derive(Debug, Clone, Default)]
pub struct RunContext {
    pub base: PathBuf,
    /// Artifacts are only written when set.
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub action: Action,
    pub config: ExperimentConfig,
    pub result: Value,
    /// Artifact files written next to the report.
    pub outputs: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}

/// Summary of a solver trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSummary {
    pub status: Status,
    pub iterations: usize,
    pub final_value: f64,
    pub final_grad_norm: f64,
    pub final_theta: f64,
    pub backtrack_count: usize,
    pub final_point: Vec<f64>,
}

impl TraceSummary {
    pub fn of(t: &Trace) -> Self {
        Self {
            status: t.status,
            iterations: t.iterations(),
            final_value: t.final_value(),
            final_grad_norm: t.final_grad_norm(),
            final_theta: *t.stepsizes.last().unwrap_or(&f64::NAN),
            backtrack_count: t.backtrack_count,
            final_point: t.final_point().to_vec(),
        }
    }
}

struct Outputs<'a> {
    dir: Option<&'a Path>,
    header: bool,
    written: Vec<String>,
}

impl Outputs<'_> {
    fn file(&mut self, name: &str, write: impl FnOnce(fs::File, bool) -> Result<()>) -> Result<()> {
        if let Some(dir) = self.dir {
            write(io::create(&dir.join(name))?, self.header)?;
            self.written.push(name.to_string());
        }
        Ok(())
    }

    fn trace(&mut self, trace: &Trace) -> Result<()> {
        self.file("trace.csv", |f, h| trace.write_csv(f, h))?;
        self.file("points.csv", |f, _| trace.write_points_csv(f))
    }

    fn samples(&mut self, samples: &[KlSample]) -> Result<()> {
        self.file("samples.csv", |f, h| write_samples_csv(f, samples, h))
    }
}

fn flat_point(v: &[f64], n: usize, what: &str) -> Result<HdpPoint> {
    if v.len() != 2 * n {
        return Err(Error::Config(format!(
            "{what} must be a flat [a; b] of length {}, got {}",
            2 * n,
            v.len()
        )));
    }
    HdpPoint::from_flat(v)
}

fn problem(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<L1Problem> {
    cfg.problem
        .as_ref()
        .ok_or_else(|| Error::Config("missing [problem] section".into()))?
        .build(&ctx.base)
}

fn start(cfg: &ExperimentConfig, n: usize) -> Result<HdpPoint> {
    match &cfg.init.point {
        Some(v) => flat_point(v, n, "init.point"),
        None => random_init(n, cfg.init.seed, cfg.init.scale),
    }
}

fn reference(cfg: &ExperimentConfig, prob: &L1Problem) -> Result<DVector<f64>> {
    match &cfg.analysis.reference {
        Some(v) if v.len() == prob.dim() => Ok(DVector::from_column_slice(v)),
        Some(v) => Err(Error::Config(format!(
            "analysis.reference has length {}, expected {}",
            v.len(),
            prob.dim()
        ))),
        None if prob.loss().is_convex() => solve_f(prob),
        None => Err(Error::Config(
            "analysis.reference is required for a nonconvex loss".into(),
        )),
    }
}

#[derive(Debug, Clone, Serialize)]
struct CheckSummary {
    points: usize,
    max_grad_rel_err: f64,
    max_hess_rel_err: f64,
    max_hess_asymmetry: f64,
    near_singular: usize,
}

fn check_many(loss: &dyn crate::Loss, points: &[DVector<f64>], step: Option<f64>) -> Result<CheckSummary> {
    let reports: Vec<DerivReport> = points
        .iter()
        .map(|x| check_derivatives(loss, x, step))
        .collect::<Result<_>>()?;
    let max = |f: fn(&DerivReport) -> f64| reports.iter().map(f).fold(0.0, f64::max);
    Ok(CheckSummary {
        points: reports.len(),
        max_grad_rel_err: max(|r| r.grad_rel_err),
        max_hess_rel_err: max(|r| r.hess_rel_err),
        max_hess_asymmetry: max(|r| r.hess_asymmetry),
        near_singular: reports.iter().filter(|r| r.near_singular_hessian).count(),
    })
}

fn uniform_box(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-radius..=radius))
}

/// Executes the config's action and, when `ctx.out_dir` is set, writes its
/// CSV artifacts there. The report itself is returned, not written.
pub fn run(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Report> {
    let action = cfg.action.ok_or_else(|| Error::Config("no action given".into()))?;
    let mut out = Outputs {
        dir: ctx.out_dir.as_deref(),
        header: cfg.output.header,
        written: vec![],
    };
    let tol = cfg.analysis.tol;
    let result = match action {
        Action::Solve => {
            let prob = problem(cfg, ctx)?;
            cfg.solver.validate()?;
            let trace = gd_backtracking(&prob, &start(cfg, prob.dim())?, &cfg.solver)?;
            out.trace(&trace)?;
            let last = HdpPoint::from_flat(trace.final_point())?;
            json!({
                "run": TraceSummary::of(&trace),
                "s": last.s().as_slice(),
                "f_value": prob.value(last.s()),
                "stationarity": second_order_test(&prob, &last, tol),
            })
        }
        Action::Classify => {
            let prob = problem(cfg, ctx)?;
            let v = cfg
                .analysis
                .point
                .as_ref()
                .ok_or_else(|| Error::Config("classify needs analysis.point".into()))?;
            let p = flat_point(v, prob.dim(), "analysis.point")?;
            let reduction = reduce(&prob, &p, tol)
                .ok()
                .map(|r| json!({ "blocks": r.map.blocks(), "point": r.point.to_flat() }));
            json!({ "report": second_order_test(&prob, &p, tol), "reduction": reduction })
        }
        Action::KlFit => {
            let prob = problem(cfg, ctx)?;
            let sstar = reference(cfg, &prob)?;
            let s = &cfg.sampling;
            let (pstar, set) = match s.mode {
                SamplingMode::Trajectory => {
                    cfg.solver.validate()?;
                    let trace = gd_backtracking(&prob, &start(cfg, prob.dim())?, &cfg.solver)?;
                    out.trace(&trace)?;
                    let pstar = HdpPoint::lift_like(&sstar, &HdpPoint::from_flat(trace.final_point())?);
                    let set = sample_kl_hdp(&prob, &pstar, SampleMode::Trajectory(&trace))?;
                    (pstar, set)
                }
                SamplingMode::Ball => {
                    let pstar = HdpPoint::lift(&sstar);
                    let set = sample_kl_hdp(
                        &prob,
                        &pstar,
                        SampleMode::Ball {
                            radius: s.radius,
                            count: s.count,
                            seed: s.seed,
                        },
                    )?;
                    (pstar, set)
                }
                SamplingMode::Ray => {
                    let pstar = HdpPoint::lift(&sstar);
                    let n2 = 2 * prob.dim();
                    let directions: Vec<DVector<f64>> = match &s.directions {
                        Some(d) => d.iter().map(|v| DVector::from_column_slice(v)).collect(),
                        None => (0..n2)
                            .map(|i| DVector::from_fn(n2, |j, _| if i == j { 1.0 } else { 0.0 }))
                            .collect(),
                    };
                    let radii = s
                        .radii
                        .clone()
                        .unwrap_or_else(|| (0..s.count.min(60)).map(|k| s.radius * 0.5f64.powi(k as i32)).collect());
                    let set = sample_kl_hdp(
                        &prob,
                        &pstar,
                        SampleMode::Ray {
                            directions: &directions,
                            radii: &radii,
                        },
                    )?;
                    (pstar, set)
                }
            };
            out.samples(&set.samples)?;
            let f_star = prob.hdp_value(&pstar);
            let window = s.window.map(|w| (w[0], w[1])).unwrap_or_else(|| default_window(f_star));
            let fit = fit_kl_exponent(&set.samples, window)?;
            let (sc, margin) = strict_complementarity(&prob, &sstar, tol)?;
            let prediction = cfg
                .analysis
                .alpha
                .map(|a| predict_exponent(a, sc, cfg.analysis.gamma))
                .transpose()?;
            json!({
                "reference_s": sstar.as_slice(),
                "reference_value": f_star,
                "strict_complementarity": sc,
                "margin": margin,
                "discarded": set.discarded,
                "fit": KlReport::new(&fit, prediction),
            })
        }
        Action::RateFit => {
            let prob = problem(cfg, ctx)?;
            cfg.solver.validate()?;
            let sstar = reference(cfg, &prob)?;
            let trace = gd_backtracking(&prob, &start(cfg, prob.dim())?, &cfg.solver)?;
            out.trace(&trace)?;
            let pstar = HdpPoint::lift_like(&sstar, &HdpPoint::from_flat(trace.final_point())?);
            json!({
                "run": TraceSummary::of(&trace),
                "reference_s": sstar.as_slice(),
                "rate": fit_convergence_rate(&trace, &pstar)?,
            })
        }
        Action::SaddleMargin => {
            let prob = problem(cfg, ctx)?;
            let scfg = SaddleMarginConfig {
                n_max: cfg.analysis.n_max,
                ..Default::default()
            };
            serde_json::to_value(saddle_margin_bruteforce(&prob, &scfg)?).expect("serializable")
        }
        Action::CheckGrad => {
            let prob = problem(cfg, ctx)?;
            let n = prob.dim();
            let a = &cfg.analysis;
            let (xs, ps): (Vec<_>, Vec<_>) = match &a.point {
                Some(v) if v.len() == n => (vec![DVector::from_column_slice(v)], vec![]),
                Some(v) if v.len() == 2 * n => (vec![], vec![DVector::from_column_slice(v)]),
                Some(v) => {
                    return Err(Error::Config(format!(
                        "analysis.point has length {}, expected {n} or {}",
                        v.len(),
                        2 * n
                    )))
                }
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sampling.seed);
                    let xs = (0..a.check_points)
                        .map(|_| uniform_box(&mut rng, n, a.check_radius))
                        .collect();
                    let ps = (0..a.check_points)
                        .map(|_| uniform_box(&mut rng, 2 * n, a.check_radius))
                        .collect();
                    (xs, ps)
                }
            };
            json!({
                "loss": prob.loss().label(),
                "h": check_many(prob.loss().as_ref(), &xs, a.fd_step)?,
                "F": check_many(prob.lifted().as_ref(), &ps, a.fd_step)?,
            })
        }
        Action::Preset => {
            let p = cfg
                .preset
                .as_ref()
                .ok_or_else(|| Error::Config("preset needs a name (--preset NAME)".into()))?;
            let run = run_preset(&p.name, &p.params)?;
            if let Some(t) = &run.trace {
                out.trace(t)?;
            }
            if !run.samples.is_empty() {
                out.samples(&run.samples)?;
            }
            json!({ "preset": p.name, "outcome": run.result })
        }
    };
    Ok(Report {
        tool: "hdp",
        version: env!("CARGO_PKG_VERSION"),
        action,
        config: cfg.clone(),
        result,
        outputs: out.written,
    })
}
