//! Enumerates the stationary points of `F` for a small lasso and classifies
//! each one as a global minimizer or a strict saddle.

use hadamard_l1::losses;
use hadamard_l1::stationarity::{
    enumerate_stationary, saddle_margin_bruteforce, second_order_test, EnumerateConfig, SaddleMarginConfig,
};
use hadamard_l1::L1Problem;
use nalgebra::{dmatrix, dvector};

fn main() -> hadamard_l1::Result<()> {
    let a = dmatrix![1.0, 0.5, -0.3; 0.2, 1.0, 0.4; -0.6, 0.1, 1.0; 0.3, -0.8, 0.2];
    let y = dvector![1.0, -0.5, 0.8, 0.3];
    let prob = L1Problem::new(losses::least_squares(a, y)?, 0.4)?;

    let margin = saddle_margin_bruteforce(&prob, &SaddleMarginConfig::default())?;
    println!("strict-saddle margin delta = {:.4}", margin.delta);

    for p in enumerate_stationary(&prob, &EnumerateConfig::default())? {
        let r = second_order_test(&prob, &p, 1e-8);
        let kind = if r.second_order == Some(true) {
            "minimizer"
        } else {
            "saddle"
        };
        println!(
            "s = {:>8.4?}  f = {:.6}  lambda_min = {:>8.4}  {kind}",
            p.s().as_slice(),
            prob.value(p.s()),
            r.lambda_min
        );
    }
    Ok(())
}
