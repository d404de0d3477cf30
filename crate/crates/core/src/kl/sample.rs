use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::KlSample;
use crate::solvers::Trace;
use crate::stationarity::{strict_complementarity, IndexSets};
use crate::{Error, HdpPoint, L1Problem, Result};

/// Where [`sample_kl_hdp`] draws its points.
#[derive(Debug, Clone, Copy)]
pub enum SampleMode<'a> {
    /// `p* + r·d` for every flat direction `d` and radius `r`.
    Ray {
        directions: &'a [DVector<f64>],
        radii: &'a [f64],
    },
    /// Uniform in the ball of the given radius around `p*`.
    Ball { radius: f64, count: usize, seed: u64 },
    /// The recorded iterates of a solver run.
    Trajectory(&'a Trace),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet {
    pub samples: Vec<KlSample>,
    /// Points whose gap was not positive.
    pub discarded: usize,
}

fn unit_normal(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let d: DVector<f64> = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
        let norm = d.norm();
        if norm > 0.0 {
            return d / norm;
        }
    }
}

/// KL samples of `F` around `pstar`: gap `F(p) − F(p*)` and slope `‖∇F(p)‖`.
///
/// Both are evaluated relative to `pstar` (see [`L1Problem::hdp_gap`]) so
/// tiny gaps keep their relative accuracy. Points with a non-positive gap are
/// counted in `discarded`.
pub fn sample_kl_hdp(prob: &L1Problem, pstar: &HdpPoint, mode: SampleMode<'_>) -> Result<SampleSet> {
    let n = pstar.dim();
    if n != prob.dim() {
        return Err(Error::invalid("reference point and problem differ in dimension"));
    }
    let base = pstar.to_vector();
    let points: Vec<HdpPoint> = match mode {
        SampleMode::Ray { directions, radii } => {
            let mut pts = Vec::with_capacity(directions.len() * radii.len());
            for d in directions {
                if d.len() != 2 * n {
                    return Err(Error::invalid(format!(
                        "ray direction has length {}, expected {}",
                        d.len(),
                        2 * n
                    )));
                }
                for &r in radii {
                    pts.push(HdpPoint::from_flat((&base + d * r).as_slice())?);
                }
            }
            pts
        }
        SampleMode::Ball { radius, count, seed } => {
            if !(radius > 0.0) {
                return Err(Error::invalid(format!("radius must be positive, got {radius}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dim = 2 * n;
            (0..count)
                .map(|_| {
                    let d = unit_normal(&mut rng, dim);
                    let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
                    HdpPoint::from_flat((&base + d * r).as_slice())
                })
                .collect::<Result<_>>()?
        }
        SampleMode::Trajectory(trace) => trace
            .iterates
            .iter()
            .map(|rec| HdpPoint::from_flat(&rec.point))
            .collect::<Result<_>>()?,
    };
    let mut out = SampleSet {
        samples: Vec::with_capacity(points.len()),
        discarded: 0,
    };
    for p in &points {
        let gap = prob.hdp_gap(p, pstar);
        if gap > 0.0 && gap.is_finite() {
            let slope = prob.hdp_grad_anchored(p, pstar).norm();
            out.samples.push(KlSample { gap, slope });
        } else {
            out.discarded += 1;
        }
    }
    Ok(out)
}

/// KL samples of `h̃(x) = h(x) − ⟨∇h(s*), x − s*⟩` on the support `I` of `s*`.
///
/// Points keep `x = s*` off the support and move along random directions on
/// it with magnitudes log-uniform in `[radius·10⁻⁴, radius]`. The gap is
/// `h̃(x) − h̃(s*)` and the slope `‖∇h̃(x)_I‖`. Requires strict
/// complementarity at `s*`; without it the error-bound route applies instead.
pub fn sample_kl_restricted(
    prob: &L1Problem,
    sstar: &DVector<f64>,
    isets: &IndexSets,
    radius: f64,
    count: usize,
    seed: u64,
    tol: f64,
) -> Result<SampleSet> {
    let (sc, _) = strict_complementarity(prob, sstar, tol)?;
    if !sc {
        return Err(Error::Unsupported(
            "strict complementarity fails at the reference point; use the error-bound exponent prediction".into(),
        ));
    }
    if !(radius > 0.0) {
        return Err(Error::invalid(format!("radius must be positive, got {radius}")));
    }
    let support = isets.support();
    let loss = prob.loss();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SampleSet {
        samples: Vec::with_capacity(count),
        discarded: 0,
    };
    if support.is_empty() {
        return Ok(out);
    }
    for _ in 0..count {
        let d = unit_normal(&mut rng, support.len());
        let r = radius * 10f64.powf(-4.0 * rng.random::<f64>());
        let mut x = sstar.clone();
        for (k, &i) in support.iter().enumerate() {
            x[i] += r * d[k];
        }
        let gap = loss.bregman(&x, sstar);
        if gap > 0.0 && gap.is_finite() {
            let dg = loss.grad_diff(&x, sstar);
            let slope = support.iter().map(|&i| dg[i] * dg[i]).sum::<f64>().sqrt();
            out.samples.push(KlSample { gap, slope });
        } else {
            out.discarded += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kl::fit_kl_exponent;
    use crate::losses;
    use crate::stationarity::index_sets;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn power_loss_ray_is_exact() {
        let alpha = 0.75;
        let prob = L1Problem::new(losses::power_1d(alpha).unwrap(), 1.0).unwrap();
        let radii: Vec<f64> = (4..=20).map(|k| 2f64.powi(-k)).collect();
        let dirs = [dvector![1.0, 0.0]];
        let set = sample_kl_hdp(
            &prob,
            &HdpPoint::zeros(1),
            SampleMode::Ray {
                directions: &dirs,
                radii: &radii,
            },
        )
        .unwrap();
        assert_eq!(set.discarded, 0);
        for (s, &t) in set.samples.iter().zip(&radii) {
            // closed form: F(t, 0) = (1 − α)t^{2/(1−α)}, ∇F(t, 0) = (2t^{(1+α)/(1−α)}, 0)
            let e = 1.0 / (1.0 - alpha);
            assert!((s.gap / ((1.0 - alpha) * t.powf(2.0 * e)) - 1.0).abs() < 1e-12);
            assert!((s.slope / (2.0 * t.powf((1.0 + alpha) * e)) - 1.0).abs() < 1e-12);
        }
        let fit = fit_kl_exponent(&set.samples, (0.0, 1.0)).unwrap();
        assert!((fit.alpha_hat - 0.875).abs() < 1e-6);
    }

    #[test]
    fn saddle_reference_discards() {
        // the origin is a strict saddle of F here, so many nearby gaps are negative
        let prob = L1Problem::new(losses::least_squares(dmatrix![1.0], dvector![3.0]).unwrap(), 1.0).unwrap();
        let set = sample_kl_hdp(
            &prob,
            &HdpPoint::zeros(1),
            SampleMode::Ball {
                radius: 0.1,
                count: 200,
                seed: 3,
            },
        )
        .unwrap();
        assert!(set.discarded > 20);
        assert_eq!(set.discarded + set.samples.len(), 200);
    }

    #[test]
    fn ball_is_deterministic() {
        let prob = L1Problem::new(losses::least_squares(dmatrix![1.0, 0.5], dvector![1.0]).unwrap(), 0.1).unwrap();
        let mode = SampleMode::Ball {
            radius: 0.5,
            count: 50,
            seed: 9,
        };
        let a = sample_kl_hdp(&prob, &HdpPoint::zeros(2), mode).unwrap();
        let b = sample_kl_hdp(&prob, &HdpPoint::zeros(2), mode).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn quadratic_support_exact() {
        // h = ½(x₁ − 2)² + x₂²/2, μ = 1: s* = (1, 0) with ∇h(s*) = (−1, 0)
        let q = losses::quadratic(dmatrix![1.0, 0.0; 0.0, 1.0], dvector![-2.0, 0.0], 2.0).unwrap();
        let prob = L1Problem::new(q, 1.0).unwrap();
        let s = dvector![1.0, 0.0];
        let isets = index_sets(&prob, &s, 1e-10).unwrap();
        let set = sample_kl_restricted(&prob, &s, &isets, 0.1, 100, 1, 1e-10).unwrap();
        let fit = fit_kl_exponent(&set.samples, (0.0, 1.0)).unwrap();
        assert!((fit.alpha_hat - 0.5).abs() < 1e-6);
    }

    #[test]
    fn restricted_needs_strict_complementarity() {
        let prob = L1Problem::new(losses::least_squares(dmatrix![1.0], dvector![-1.0]).unwrap(), 1.0).unwrap();
        let s = dvector![0.0];
        let isets = index_sets(&prob, &s, 1e-10).unwrap();
        let err = sample_kl_restricted(&prob, &s, &isets, 0.1, 10, 1, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }
}
