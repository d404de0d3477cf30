//! Empirical KL exponents of `F`: a ray fit at the origin for the power loss
//! and a trajectory fit on a lasso without strict complementarity.

use hadamard_l1::experiment::{lasso_nosc, power_ray};

fn main() -> hadamard_l1::Result<()> {
    for alpha in [0.6, 0.75, 0.9] {
        let out = power_ray(alpha)?;
        println!(
            "power loss alpha = {alpha}: fitted {:.6}, predicted {:.6}",
            out.kl.alpha_hat,
            out.kl.prediction.unwrap_or(f64::NAN)
        );
    }

    let out = lasso_nosc(0)?;
    println!(
        "lasso, boundary dual: fitted {:.4} on {} samples, predicted {:.4}; rate {:?}",
        out.kl.alpha_hat,
        out.kl.n_samples,
        out.kl.prediction.unwrap_or(f64::NAN),
        out.rate.model
    );
    Ok(())
}
