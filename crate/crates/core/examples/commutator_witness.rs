//! The commutator witness chain with b = log|x| and power inputs.
//!
//! cargo run --example commutator_witness

use hardy_lab::harness::{commutator_witness_check, WitnessOptions};
use hardy_lab::kernels::{KernelSpec, Mode, Scenario};
use hardy_lab::weights::Weight;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = Scenario::new(
        "commutator",
        1,
        Mode::Commutator,
        KernelSpec::coordinate(1),
        vec![Weight::unweighted(1)],
        vec![2.0],
        Some(vec![4.0]),
        Some(vec![-0.25]),
    )?;
    let r = commutator_witness_check(&s, &WitnessOptions::default())?;
    println!("witness integral {:.12} (16/9 = {:.12})", r.witness_integral.unwrap(), 16.0 / 9.0);
    println!("max pointwise rel over {} points {:.2e}", r.points.len(), r.pointwise_max_rel);
    println!("norm ratio {:.12}, predicted {:.12}", r.measured_ratio, r.predicted_ratio);
    println!("C = {:?}, D = {:?}", r.c.value, r.d.value);
    println!("pass {}", r.pass);
    Ok(())
}
