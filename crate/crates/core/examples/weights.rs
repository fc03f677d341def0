//! Homogeneous weights: sphere measures, ball integrals and the product
//! weight of a multilinear scenario.
//!
//! cargo run --example weights

use hardy_lab::weights::{unit_sphere_area, Angular, Weight};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for d in 1..=4 {
        println!("|S^{}| = {:.12}", d - 1, unit_sphere_area(d));
    }
    let w = Weight::power(3, 1.0);
    println!("|x| in R^3: w(S) = {:.12}, w(B(0,2)) = {:.12}", w.sphere_integral()?, w.ball_integral(2.0)?);

    let zonal = Weight { d: 2, degree: 0.5, angular: Angular::FirstCoordinate { scale: 1.0, exponent: 2.0 } };
    println!("|x|^(1/2) (x1/|x|)^2 in R^2: w(S) = {:.12} (pi)", zonal.sphere_integral()?);

    let a = Weight::scaled_power(2, 2.0, 1.0);
    let b = Weight::power(2, -0.5);
    let prod = Weight::product(&[(a.clone(), 0.5), (b.clone(), 0.5)])?;
    println!("product weight degree {} and sphere measure {:.12}", prod.degree, prod.sphere_integral()?);
    println!("locally integrable: |x|^(-3) in R^2 -> {}", Weight::power(2, -3.0).locally_integrable());
    Ok(())
}
