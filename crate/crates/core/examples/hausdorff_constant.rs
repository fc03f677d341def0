//! Hausdorff kernels on the positive orthant: psi = e^(-t), s = 1/t gives
//! A* = Gamma(1 + 1/p).
//!
//! cargo run --example hausdorff_constant

use hardy_lab::constants::{compute_constant, ConstantKind, ConstantOptions};
use hardy_lab::kernels::{Domain, KernelSpec, Scenario};
use statrs::function::gamma::gamma;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in [1.5, 2.0, 3.0, 5.0] {
        let k = KernelSpec::parse("exp(-t1)", &["1/t1"], 1, Domain::PositiveOrthant)?;
        let s = Scenario::lebesgue("hausdorff", 1, k, vec![p])?;
        let c = compute_constant(ConstantKind::AStar, &s, &ConstantOptions::default())?;
        let want = gamma(1.0 + 1.0 / p);
        let v = c.value.unwrap();
        println!("p = {p}: A* = {v:.12}, Gamma(1+1/p) = {want:.12}, rel {:.1e}", (v - want).abs() / want);
    }
    Ok(())
}
