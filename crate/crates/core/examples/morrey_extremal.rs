//! Power extremals in central Morrey spaces: balanced exponents attain the
//! constant, unbalanced ones lose the normalization factor.
//!
//! cargo run --example morrey_extremal

use hardy_lab::harness::{morrey_extremal_check, ExtremalOptions};
use hardy_lab::kernels::{KernelSpec, Mode, Scenario};
use hardy_lab::weights::Weight;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for lambda in [vec![-0.125, -0.125], vec![-0.05, -0.2]] {
        let w = vec![Weight::unweighted(1); 2];
        let s = Scenario::new(
            "morrey",
            1,
            Mode::Morrey,
            KernelSpec::coordinate(2),
            w,
            vec![4.0, 4.0],
            None,
            Some(lambda.clone()),
        )?;
        let r = morrey_extremal_check(&s, &ExtremalOptions::default())?;
        println!("lambda = {lambda:?}");
        println!("  B = {:.12}", r.constant.value.unwrap());
        println!("  measured ratio {:.12}, predicted {:.12}", r.measured_ratio, r.predicted_ratio);
        println!("  normalization {:.12}, necessity slack {:.3e}", r.normalization, r.necessity.slack);
        println!("  direction consistent {}, pass {}", r.direction_consistent, r.pass);
    }
    Ok(())
}
