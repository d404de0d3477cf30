//! Runs a TOML experiment config through the library entry point.

use hadamard_l1::experiment::{run, ExperimentConfig, RunContext};

const CONFIG: &str = r#"
action = "classify"

[problem]
mu = 1.0

[problem.loss]
kind = "least_squares"
A = [[1.0, 0.0], [0.0, 1.0]]
y = [3.0, 0.5]

[analysis]
point = [1.4142135623730951, 0.0, 0.0, 0.0]
"#;

fn main() -> hadamard_l1::Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let report = run(&cfg, &RunContext::default())?;
    print!("{}", report.to_json());
    Ok(())
}
