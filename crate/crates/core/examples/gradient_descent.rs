//! Gradient descent with a persistent backtracking stepsize on `F`, compared
//! with ISTA on `f`.

use hadamard_l1::losses;
use hadamard_l1::solvers::{gd_backtracking, ista, random_init, GdConfig};
use hadamard_l1::{HdpPoint, L1Problem};
use nalgebra::{dmatrix, dvector, DVector};

fn main() -> hadamard_l1::Result<()> {
    let a = dmatrix![1.0, 0.5, -0.3; 0.2, 1.0, 0.4; -0.6, 0.1, 1.0; 0.3, -0.8, 0.2];
    let y = dvector![1.0, -0.5, 0.8, 0.3];
    let prob = L1Problem::new(losses::least_squares(a, y)?, 0.4)?;

    let cfg = GdConfig {
        grad_tol: 1e-10,
        ..Default::default()
    };
    let trace = gd_backtracking(&prob, &random_init(3, 7, 1.0)?, &cfg)?;
    let p = HdpPoint::from_flat(trace.final_point())?;
    println!(
        "descent: {:?} after {} iterations, {} backtracks, final theta {}",
        trace.status,
        trace.iterations(),
        trace.backtrack_count,
        trace.stepsizes.last().unwrap()
    );
    println!("  s = {:.6?}, f = {:.10}", p.s().as_slice(), prob.value(p.s()));

    let x = ista(&prob, &DVector::zeros(3), 0.5, 100_000, 1e-12)?;
    let x = DVector::from_column_slice(x.final_point());
    println!("ista:    x = {:.6?}, f = {:.10}", x.as_slice(), prob.value(&x));
    Ok(())
}
