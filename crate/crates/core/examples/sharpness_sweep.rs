//! Epsilon sweep of the extremal family for the two-slot monomial kernel,
//! printed as the CSV table the CLI writes.
//!
//! cargo run --release --example sharpness_sweep

use hardy_lab::harness::{sharpness_sweep, SweepOptions};
use hardy_lab::kernels::{KernelSpec, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = Scenario::lebesgue("m2", 1, KernelSpec::coordinate(2), vec![4.0, 4.0])?;
    let r = sharpness_sweep(&s, &SweepOptions::default())?;
    print!("{}", r.csv());
    println!(
        "target {:.10}, extrapolated limit {:.10}, monotone {}, below target {}, pass {}",
        r.target.unwrap(),
        r.limit.unwrap_or(f64::NAN),
        r.monotone,
        r.below_target,
        r.pass
    );
    Ok(())
}
