//! Adaptive cube quadrature with face-singularity hints, and the divergence
//! flag on a non-integrable edge.
//!
//! cargo run --example quadrature

use hardy_lab::quad::{integrate_positive_orthant, integrate_unit_cube, AxisHint, FaceHints, QuadOptions};

fn main() {
    let opts = QuadOptions::with_tol(1e-10);

    let h = FaceHints::guessed(vec![AxisHint::at_zero(-0.5)]);
    let r = integrate_unit_cube(|t: &[f64]| t[0].powf(-0.5), 1, &h, &opts);
    println!("int t^(-1/2) = {:.14} ({:?}, {} evaluations)", r.value, r.status, r.evaluations);

    let h = FaceHints::guessed(vec![AxisHint { zero: -0.25, log_zero: 1.0, ..Default::default() }; 2]);
    let r = integrate_unit_cube(|t: &[f64]| t.iter().map(|x| x.powf(-0.25) * (1.0 / x).ln()).product(), 2, &h, &opts);
    println!("int (t^(-1/4) log(1/t))^(x2) = {:.12} (oracle {:.12})", r.value, (16.0f64 / 9.0).powi(2));

    let r = integrate_positive_orthant(|t: &[f64]| (-t[0]).exp() * t[0].sqrt(), 1, &FaceHints::none(1), &opts);
    println!("int_0^inf e^(-t) t^(1/2) = {:.12} (sqrt(pi)/2 = {:.12})", r.value, std::f64::consts::PI.sqrt() / 2.0);

    let h = FaceHints::guessed(vec![AxisHint::at_zero(-1.0)]);
    let r = integrate_unit_cube(|t: &[f64]| 1.0 / t[0], 1, &h, &opts);
    println!("int 1/t: divergent = {} ({:?})", r.is_divergent(), r.status);
}
