//! Seeded random monomial scenarios: the norm ratio of a random power input
//! never exceeds the sharp constant.
//!
//! cargo run --release --example upper_bound_fuzz

use hardy_lab::harness::{upper_bound_fuzz, FuzzOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = upper_bound_fuzz(&FuzzOptions { trials: 12, ..Default::default() })?;
    for t in &r.records {
        println!(
            "trial {:>2}: d={} m={} n={} psi={} ratio/A = {:.6}",
            t.trial,
            t.scenario.d,
            t.scenario.m(),
            t.scenario.kernel.n,
            t.scenario.kernel.psi,
            t.ratio / t.constant
        );
    }
    println!("max ratio/A {:.6}, violations {}, pass {}", r.max_ratio_over_constant, r.violations.len(), r.pass);
    Ok(())
}
