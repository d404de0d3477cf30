//! Hölderian error-bound probe on the solution segment of a degenerate lasso.

use hadamard_l1::kl::{errorbound_probe, ErrorBoundConfig, Segment};
use hadamard_l1::losses;
use hadamard_l1::stationarity::index_sets;
use hadamard_l1::L1Problem;
use nalgebra::{dmatrix, dvector};

fn main() -> hadamard_l1::Result<()> {
    // minimizers: {x ≥ 0 : x₁ + x₂ = 0.9}
    let prob = L1Problem::new(losses::least_squares(dmatrix![1.0, 1.0], dvector![1.0])?, 0.1)?;
    let sstar = dvector![0.9, 0.0];
    let isets = index_sets(&prob, &sstar, 1e-12)?;
    let omega = Segment {
        p: dvector![0.9, 0.0],
        q: dvector![0.0, 0.9],
    };
    let cfg = ErrorBoundConfig {
        gamma: 1.0,
        seed: 1,
        ..Default::default()
    };
    let probe = errorbound_probe(&omega, &sstar, &isets, &cfg)?;
    for row in &probe.rows {
        println!(
            "radius {:>6}: worst ratio {:.4}, mean {:.4}",
            row.radius, row.worst_ratio, row.mean_ratio
        );
    }
    println!("spread across radii: {:.4}", probe.spread);
    Ok(())
}
