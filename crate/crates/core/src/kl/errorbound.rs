use std::fmt;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::stationarity::{critical_cone, IndexSets};
use crate::{Error, Result};

/// A closed convex solution set `Ω` with a Euclidean projection.
pub trait SolutionSet: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn project(&self, x: &DVector<f64>) -> DVector<f64>;

    fn dist(&self, x: &DVector<f64>) -> f64 {
        (x - self.project(x)).norm()
    }

    /// Exact projection onto `Ω ∩ {y : |yᵢ − cᵢ| ≤ ρᵢ for i ∈ idx}`, if this
    /// set has one. `None` falls back to Dykstra's algorithm.
    fn project_restricted(
        &self,
        _x: &DVector<f64>,
        _center: &DVector<f64>,
        _idx: &[usize],
        _rho: &[f64],
    ) -> Option<DVector<f64>> {
        None
    }
}

fn project_box(x: &DVector<f64>, center: &DVector<f64>, idx: &[usize], rho: &[f64]) -> DVector<f64> {
    let mut y = x.clone();
    for (&i, &r) in idx.iter().zip(rho) {
        y[i] = y[i].clamp(center[i] - r, center[i] + r);
    }
    y
}

/// Dykstra's algorithm for the projection onto `Ω ∩ S`, `S` a box.
fn dykstra(
    omega: &dyn SolutionSet,
    x: &DVector<f64>,
    center: &DVector<f64>,
    idx: &[usize],
    rho: &[f64],
    sweeps: usize,
    tol: f64,
) -> DVector<f64> {
    let mut y = x.clone();
    let mut p = DVector::zeros(x.len());
    let mut q = DVector::zeros(x.len());
    for _ in 0..sweeps {
        let z = omega.project(&(&y + &p));
        p = &y + &p - &z;
        let next = project_box(&(&z + &q), center, idx, rho);
        q = &z + &q - &next;
        let done = (&next - &y).norm() <= tol && (&next - &z).norm() <= tol;
        y = next;
        if done {
            break;
        }
    }
    y
}

/// `Ω = {p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Singleton(pub DVector<f64>);

impl SolutionSet for Singleton {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn project(&self, _x: &DVector<f64>) -> DVector<f64> {
        self.0.clone()
    }

    fn project_restricted(
        &self,
        _x: &DVector<f64>,
        center: &DVector<f64>,
        idx: &[usize],
        rho: &[f64],
    ) -> Option<DVector<f64>> {
        let inside = idx.iter().zip(rho).all(|(&i, &r)| (self.0[i] - center[i]).abs() <= r);
        inside.then(|| self.0.clone())
    }
}

/// The segment `[p, q]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub p: DVector<f64>,
    pub q: DVector<f64>,
}

impl Segment {
    fn at(&self, lambda: f64) -> DVector<f64> {
        &self.p + (&self.q - &self.p) * lambda
    }

    fn param(&self, x: &DVector<f64>) -> f64 {
        let e = &self.q - &self.p;
        let ee = e.norm_squared();
        if ee == 0.0 {
            0.0
        } else {
            (x - &self.p).dot(&e) / ee
        }
    }
}

impl SolutionSet for Segment {
    fn dim(&self) -> usize {
        self.p.len()
    }

    fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        self.at(self.param(x).clamp(0.0, 1.0))
    }

    fn project_restricted(
        &self,
        x: &DVector<f64>,
        center: &DVector<f64>,
        idx: &[usize],
        rho: &[f64],
    ) -> Option<DVector<f64>> {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for (&i, &r) in idx.iter().zip(rho) {
            let e = self.q[i] - self.p[i];
            let (a, b) = (center[i] - r - self.p[i], center[i] + r - self.p[i]);
            if e == 0.0 {
                if a > 0.0 || b < 0.0 {
                    return None;
                }
            } else {
                let (u, v) = if e > 0.0 { (a / e, b / e) } else { (b / e, a / e) };
                lo = lo.max(u);
                hi = hi.min(v);
            }
        }
        (lo <= hi).then(|| self.at(self.param(x).clamp(lo, hi)))
    }
}

/// A Euclidean ball; intersections go through Dykstra's algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSet {
    pub center: DVector<f64>,
    pub radius: f64,
}

impl SolutionSet for BallSet {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        let d = x - &self.center;
        let n = d.norm();
        if n <= self.radius {
            x.clone()
        } else {
            &self.center + d * (self.radius / n)
        }
    }
}

/// `Ω = {x ∈ ℝ²₊ : x₂ ≥ x₁^{1/γ}}`, the minimizers of the two-dimensional
/// hinge-power loss plus `‖x‖₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HingeEpigraph {
    pub gamma: f64,
}

impl HingeEpigraph {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::invalid(format!("gamma must lie in (0, 1], got {gamma}")));
        }
        Ok(Self { gamma })
    }

    fn q(&self) -> f64 {
        1.0 / self.gamma
    }

    /// Nearest point of the curve `(t, t^q)`, `t ∈ [lo, hi]`, by a grid scan
    /// refined with golden-section search.
    fn nearest_on_curve(&self, x: &DVector<f64>, lo: f64, hi: f64) -> DVector<f64> {
        let q = self.q();
        let phi = |t: f64| (t - x[0]).powi(2) + (t.powf(q) - x[1]).powi(2);
        const GRID: usize = 256;
        let at = |k: usize| lo + (hi - lo) * k as f64 / GRID as f64;
        let best = (0..=GRID)
            .min_by(|&a, &b| phi(at(a)).total_cmp(&phi(at(b))))
            .unwrap_or(0);
        let (mut a, mut b) = (at(best.saturating_sub(1)), at((best + 1).min(GRID)));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            if b - a <= f64::EPSILON * b.abs() {
                break;
            }
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if phi(c) <= phi(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let t = 0.5 * (a + b);
        DVector::from_vec(vec![t, t.powf(q)])
    }

    fn nearest(x: &DVector<f64>, candidates: impl IntoIterator<Item = DVector<f64>>) -> DVector<f64> {
        candidates
            .into_iter()
            .min_by(|a, b| (x - a).norm_squared().total_cmp(&(x - b).norm_squared()))
            .expect("at least one candidate")
    }
}

fn clamp_segment(x: &DVector<f64>, fixed: usize, value: f64, lo: f64, hi: f64) -> DVector<f64> {
    let mut y = x.clone();
    y[fixed] = value;
    let free = 1 - fixed;
    y[free] = y[free].clamp(lo.min(hi), hi);
    y
}

impl SolutionSet for HingeEpigraph {
    fn dim(&self) -> usize {
        2
    }

    fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        let q = self.q();
        if x[0] >= 0.0 && x[1] >= x[0].powf(q) {
            return x.clone();
        }
        // the nearest point is within ‖x‖ of the origin, so t ≤ 2‖x‖
        let hi = 2.0 * x.norm();
        let left = DVector::from_vec(vec![0.0, x[1].max(0.0)]);
        Self::nearest(x, [left, self.nearest_on_curve(x, 0.0, hi)])
    }

    fn project_restricted(
        &self,
        x: &DVector<f64>,
        center: &DVector<f64>,
        idx: &[usize],
        rho: &[f64],
    ) -> Option<DVector<f64>> {
        if center.iter().any(|&c| c != 0.0) || idx != [0, 1] {
            return None;
        }
        let q = self.q();
        let top = rho[1];
        let m = rho[0].min(top.powf(self.gamma));
        if x[0] >= 0.0 && x[0] <= m && x[1] >= x[0].powf(q) && x[1] <= top {
            return Some(x.clone());
        }
        let pieces = [
            clamp_segment(x, 0, 0.0, 0.0, top),
            clamp_segment(x, 1, top, 0.0, m),
            clamp_segment(x, 0, m, m.powf(q), top),
            self.nearest_on_curve(x, 0.0, m),
        ];
        Some(Self::nearest(x, pieces))
    }
}

/// Settings for [`errorbound_probe`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBoundConfig {
    pub gamma: f64,
    pub radii: Vec<f64>,
    /// Samples per radius.
    pub count: usize,
    pub seed: u64,
    /// Coordinate magnitudes are log-uniform over this many decades below
    /// the radius.
    pub decades: f64,
    pub dykstra_sweeps: usize,
    pub dykstra_tol: f64,
}

impl Default for ErrorBoundConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            radii: vec![1e-1, 1e-2, 1e-3],
            count: 2000,
            seed: 0,
            decades: 4.0,
            dykstra_sweeps: 10_000,
            dykstra_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBoundRow {
    pub radius: f64,
    pub worst_ratio: f64,
    pub mean_ratio: f64,
    pub samples: usize,
    /// Samples already in `Ω ∩ S_ρ`, where the ratio is undefined.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBoundProbe {
    pub worst_ratio: f64,
    /// Largest over smallest per-radius worst ratio.
    pub spread: f64,
    pub rows: Vec<ErrorBoundRow>,
}

/// Empirical constant of the Hölderian error bound
/// `dist(x, Ω ∩ S_ρ) ≤ c·max{dist(x, Ω), dist(x, S_ρ)}^γ`
/// with `S_ρ = {x : |xᵢ − s*ᵢ| ≤ ρᵢ, i ∈ J3}`.
///
/// For each radius `r`, points `x = s* + Π_K(d)` are drawn with independent
/// coordinates of magnitude log-uniform in `[r·10^{−decades}, r]`, `K` the
/// critical cone. Each point is paired with one of four choices of `ρ` in
/// rotation: `|x − s*|` on `J3`, a random fraction of it, an independent
/// random box, and `0`.
pub fn errorbound_probe(
    omega: &dyn SolutionSet,
    sstar: &DVector<f64>,
    isets: &IndexSets,
    cfg: &ErrorBoundConfig,
) -> Result<ErrorBoundProbe> {
    let n = sstar.len();
    if omega.dim() != n || isets.dim() != n {
        return Err(Error::invalid(
            "solution set, reference point and index sets differ in dimension",
        ));
    }
    if cfg.radii.is_empty() || cfg.radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::invalid("radii must be positive and nonempty"));
    }
    if !(cfg.gamma > 0.0 && cfg.gamma <= 1.0) {
        return Err(Error::invalid(format!("gamma must lie in (0, 1], got {}", cfg.gamma)));
    }
    let cone = critical_cone(isets);
    let j3 = isets.j3();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::with_capacity(cfg.radii.len());
    for &r in &cfg.radii {
        let mut row = ErrorBoundRow {
            radius: r,
            worst_ratio: 0.0,
            mean_ratio: 0.0,
            samples: 0,
            skipped: 0,
        };
        let mut total = 0.0;
        for k in 0..cfg.count {
            let d = DVector::from_fn(n, |_, _| {
                let mag = r * 10f64.powf(-cfg.decades * rng.random::<f64>());
                if rng.random::<bool>() {
                    mag
                } else {
                    -mag
                }
            });
            let x = sstar + cone.project(&d);
            let rho: Vec<f64> = j3
                .iter()
                .map(|&i| {
                    let e = (x[i] - sstar[i]).abs();
                    match k % 4 {
                        0 => e,
                        1 => e * rng.random::<f64>(),
                        2 => r * 10f64.powf(-cfg.decades * rng.random::<f64>()),
                        _ => 0.0,
                    }
                })
                .collect();
            let target = omega
                .project_restricted(&x, sstar, &j3, &rho)
                .unwrap_or_else(|| dykstra(omega, &x, sstar, &j3, &rho, cfg.dykstra_sweeps, cfg.dykstra_tol));
            let num = (&x - target).norm();
            let d_omega = omega.dist(&x);
            let d_box = (&x - project_box(&x, sstar, &j3, &rho)).norm();
            let den = d_omega.max(d_box).powf(cfg.gamma);
            if !(den > 0.0) {
                row.skipped += 1;
                continue;
            }
            let ratio = num / den;
            row.samples += 1;
            total += ratio;
            row.worst_ratio = row.worst_ratio.max(ratio);
        }
        row.mean_ratio = if row.samples > 0 {
            total / row.samples as f64
        } else {
            f64::NAN
        };
        rows.push(row);
    }
    let worst_ratio = rows.iter().map(|r| r.worst_ratio).fold(0.0, f64::max);
    let least = rows.iter().map(|r| r.worst_ratio).fold(f64::INFINITY, f64::min);
    Ok(ErrorBoundProbe {
        worst_ratio,
        spread: worst_ratio / least,
        rows,
    })
}
