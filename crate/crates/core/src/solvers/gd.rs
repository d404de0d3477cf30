use serde::{Deserialize, Serialize};

use super::trace::{Recorder, Status, Trace};
use crate::model::{HdpPoint, L1Problem};
use crate::{Error, Result};

/// Parameters of [`gd_backtracking`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GdConfig {
    /// Initial stepsize θ₀ > 0.
    pub theta0: f64,
    /// Backtracking factor κ ∈ (0, 1).
    pub kappa: f64,
    pub max_iter: usize,
    pub grad_tol: f64,
    pub record_every: usize,
    /// Cap on stepsize reductions within a single iteration.
    pub max_backtracks: usize,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self {
            theta0: 1.0,
            kappa: 0.5,
            max_iter: 100_000,
            grad_tol: 1e-9,
            record_every: 1,
            max_backtracks: 200,
        }
    }
}

impl GdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta0 > 0.0 && self.theta0.is_finite()) {
            return Err(Error::invalid(format!("theta0 must be positive, got {}", self.theta0)));
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::invalid(format!("kappa must lie in (0, 1), got {}", self.kappa)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        if !(self.grad_tol >= 0.0) {
            return Err(Error::invalid("grad_tol must be nonnegative"));
        }
        Ok(())
    }
}

/// Gradient descent on `F` with a backtracking stepsize that is never reset.
///
/// Each iteration tries `(a, b) − θ∇F(a, b)` and shrinks `θ ← κθ` while
///
/// ```text
/// F(trial) > F(a, b) − (θ²/2)‖∇F(a, b)‖²
/// ```
///
/// The reduced θ carries over to later iterations. A non-finite trial value
/// counts as a failed test. The difference `F(trial) − F(a, b)` is evaluated
/// through [`L1Problem::hdp_gap`], which keeps its relative accuracy when it
/// is far below the rounding error of `F` itself; plain subtraction would
/// fail the test on rounding noise near a minimizer and drive θ to zero.
/// The accepted differences are kept in [`Trace::decreases`]. The run stops
/// once `‖∇F‖ ≤ grad_tol` or after `max_iter` steps.
pub fn gd_backtracking(prob: &L1Problem, p0: &HdpPoint, cfg: &GdConfig) -> Result<Trace> {
    cfg.validate()?;
    if p0.dim() != prob.dim() {
        return Err(Error::invalid(format!(
            "initial point has dimension {}, problem has {}",
            p0.dim(),
            prob.dim()
        )));
    }
    let mut fval = prob.hdp_value(p0);
    if !fval.is_finite() {
        return Err(Error::invalid("F is not finite at the initial point"));
    }

    let mut p = p0.clone();
    let mut theta = cfg.theta0;
    let mut values = Vec::new();
    let mut grad_norms = Vec::new();
    let mut stepsizes = Vec::new();
    let mut backtracks = Vec::new();
    let mut decreases = Vec::new();
    let mut recorder = Recorder::new(cfg.record_every);
    let mut backtrack_count = 0;

    recorder.push(0, p.to_flat());
    let status = 'outer: loop {
        let k = values.len();
        let g = prob.hdp_grad(&p);
        let gn = g.norm();
        values.push(fval);
        grad_norms.push(gn);
        stepsizes.push(theta);
        if !gn.is_finite() {
            break Status::NonFinite;
        }
        if gn <= cfg.grad_tol {
            break Status::Converged;
        }
        if k == cfg.max_iter {
            break Status::MaxIter;
        }

        let decrease = 0.5 * gn * gn;
        let mut cuts = 0;
        let (trial, ft, diff) = loop {
            let trial = p.step(&g, theta);
            let ft = prob.hdp_value(&trial);
            let diff = prob.hdp_gap(&trial, &p);
            if ft.is_finite() && diff <= -theta * theta * decrease {
                break (trial, ft, diff);
            }
            if cuts == cfg.max_backtracks {
                break 'outer Status::Stalled;
            }
            theta *= cfg.kappa;
            cuts += 1;
        };
        backtrack_count += cuts;
        backtracks.push(cuts);
        decreases.push(diff);
        // the accepted θ is the one used for this step
        stepsizes[k] = theta;
        p = trial;
        fval = ft;
        recorder.push(k + 1, p.to_flat());
    };
    backtracks.resize(values.len(), 0);

    Ok(Trace {
        values,
        grad_norms,
        stepsizes,
        iterates: recorder.finish(),
        status,
        backtrack_count,
        backtracks,
        decreases,
    })
}
