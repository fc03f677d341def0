//! Pointwise evaluation of the multilinear operator: quadrature against the
//! power-input closed form, and a non-radial input.
//!
//! cargo run --example operator_eval

use hardy_lab::kernels::{Domain, KernelSpec, Scenario};
use hardy_lab::operators::{apply, apply_radial_closed_form, InputFunction, OperatorInstance};
use hardy_lab::quad::QuadOptions;
use hardy_lab::spaces::RadialFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = QuadOptions::with_tol(1e-10);
    let k = KernelSpec::parse("1", &["t1", "t2"], 2, Domain::UnitCube)?;
    let s = Scenario::lebesgue("m2", 2, k, vec![4.0, 4.0])?;
    let inst = OperatorInstance::radial(&s, vec![RadialFunction::power(1.0, -0.5), RadialFunction::power(2.0, -0.25)])?;
    let cf = apply_radial_closed_form(&inst, false, &q)?;
    println!("closed form: {:.12} |x|^{}", cf.coefficient.unwrap(), cf.exponent);
    for x in [[1.0, 0.0], [0.3, -0.4], [2.0, 5.0]] {
        let r = apply(&inst, &x, &q)?;
        let nx = (x[0] * x[0] + x[1] * x[1]).sqrt();
        println!(
            "x = {x:?}: quadrature {:.12}, closed form {:.12}",
            r.value,
            cf.coefficient.unwrap() * nx.powf(cf.exponent)
        );
    }

    // a cut input and a Gaussian bump
    let bump = InputFunction::point(|y: &[f64]| (-(y[0] * y[0] + y[1] * y[1])).exp());
    let cut = InputFunction::Radial(RadialFunction::power(1.0, -0.75).with_inner(1.0));
    let inst = OperatorInstance::new(&s, vec![cut, bump])?;
    let r = apply(&inst, &[3.0, 0.0], &q)?;
    println!("mixed inputs at (3, 0): {:.12} ({:?})", r.value, r.status);
    Ok(())
}
