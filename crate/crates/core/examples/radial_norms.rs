//! Weighted Lebesgue, central Morrey and CMO norms of radial functions.
//!
//! cargo run --example radial_norms

use hardy_lab::expr::Expr;
use hardy_lab::spaces::{central_morrey_norm, cmo_norm, lp_norm, morrey_power_norm, NormOptions, RadialFunction};
use hardy_lab::weights::{unit_sphere_area, Weight};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let quad = NormOptions { force_quadrature: true, ..Default::default() };
    let closed = NormOptions::default();

    // extremal input |x|^{-(d+a)/p - eps} on |x| >= 1
    let (d, alpha, p) = (2, 1.0, 3.0);
    let w = Weight::power(d, alpha);
    for eps in [1e-1, 1e-2, 1e-3] {
        let f = RadialFunction::power(1.0, -(d as f64 + alpha) / p - eps).with_inner(1.0);
        let n = lp_norm(&f, &w, p, &quad)?;
        let want = (unit_sphere_area(d) / (p * eps)).powf(1.0 / p);
        println!("eps = {eps:<6} L^p norm {:.10} (oracle {want:.10})", n.value);
    }

    let lambda = -0.2;
    let f = RadialFunction::power(1.0, (d as f64 + alpha) * lambda);
    let n = central_morrey_norm(&f, &w, p, lambda, &quad)?;
    let hi = n.brackets.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = n.brackets.iter().cloned().fold(f64::INFINITY, f64::min);
    println!(
        "Morrey norm of |x|^{:.2}: {:.12} (closed form {:.12}), bracket spread {:.1e} over {} radii",
        (d as f64 + alpha) * lambda,
        n.value,
        morrey_power_norm(&w, p, lambda)?,
        (hi - lo) / hi,
        n.brackets.len()
    );
    let g = RadialFunction::power(1.0, -0.1).with_inner(1.0);
    let n = central_morrey_norm(&g, &w, p, lambda, &quad)?;
    println!("Morrey norm of a slower power: divergent = {}", n.divergent);

    let b = RadialFunction::new(Expr::radius().ln());
    for d in 1..=3 {
        let n = cmo_norm(&b, &Weight::unweighted(d), 2.0, 0.0, &closed)?;
        println!("CMO^2 norm of log|x| in R^{d}: {:.12} (1/d = {:.12})", n.value, 1.0 / d as f64);
    }
    Ok(())
}
