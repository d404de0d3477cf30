use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::model::HdpPoint;
use crate::{Error, Result};

/// `(a, b)` with i.i.d. `N(0, scale²)` entries, deterministic in `seed`.
pub fn random_init(n: usize, seed: u64, scale: f64) -> Result<HdpPoint> {
    if n == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid(format!("scale must be positive, got {scale}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, scale).expect("valid deviation");
    let a = DVector::from_fn(n, |_, _| normal.sample(&mut rng));
    let b = DVector::from_fn(n, |_, _| normal.sample(&mut rng));
    HdpPoint::new(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(random_init(5, 11, 1.0).unwrap(), random_init(5, 11, 1.0).unwrap());
        assert_ne!(random_init(5, 11, 1.0).unwrap(), random_init(5, 12, 1.0).unwrap());
    }

    #[test]
    fn mean_near_zero() {
        let p = random_init(5000, 3, 2.0).unwrap();
        let flat = p.to_flat();
        let n = flat.len() as f64;
        let mean = flat.iter().sum::<f64>() / n;
        let se = 2.0 / n.sqrt();
        assert!(mean.abs() < 5.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn invalid_arguments() {
        assert!(random_init(0, 1, 1.0).is_err());
        assert!(random_init(3, 1, 0.0).is_err());
    }
}
