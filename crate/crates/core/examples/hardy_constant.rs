//! The classical Hardy constant p/(p-1) and the power-kernel family
//! 1/(a + 1 - 1/p), by closed form and by forced quadrature.
//!
//! cargo run --example hardy_constant

use hardy_lab::constants::{compute_constant, ConstantKind, ConstantOptions};
use hardy_lab::kernels::{Domain, KernelSpec, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let forced = ConstantOptions { force_quadrature: true, ..Default::default() };
    println!("{:>5} {:>18} {:>18} {:>18}", "p", "closed form", "quadrature", "p/(p-1)");
    for p in [1.25, 1.5, 2.0, 3.0, 6.0] {
        let s = Scenario::lebesgue("hardy", 1, KernelSpec::coordinate(1), vec![p])?;
        let a = compute_constant(ConstantKind::A, &s, &ConstantOptions::default())?;
        let q = compute_constant(ConstantKind::A, &s, &forced)?;
        println!("{p:>5} {:>18.14} {:>18.14} {:>18.14}", a.value.unwrap(), q.value.unwrap(), p / (p - 1.0));
    }

    println!("\npsi = t^a with p = 2: finite iff a > -1/2");
    for a in [-0.75, -0.5, -0.25, 0.0, 1.0] {
        let k = KernelSpec::parse(&format!("t1^({a})"), &["t1"], 1, Domain::UnitCube)?;
        let s = Scenario::lebesgue("power", 1, k, vec![2.0])?;
        let c = compute_constant(ConstantKind::A, &s, &ConstantOptions::default())?;
        match c.value {
            Some(v) => println!("a = {a:>5}: A = {v:.12} (1/(a+1/2) = {:.12})", 1.0 / (a + 0.5)),
            None => println!("a = {a:>5}: divergent"),
        }
    }
    Ok(())
}
