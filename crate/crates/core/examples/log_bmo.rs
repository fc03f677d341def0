//! Mean oscillation of log|x| on unit intervals against the two bounds of
//! the classical argument, for three doubling power weights.
//!
//! cargo run --example log_bmo

use hardy_lab::spaces::log_bmo_check;
use hardy_lab::weights::Weight;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let centers: Vec<f64> = (0..16).map(|i| -3.75 + 0.5 * i as f64).collect();
    for alpha in [0.0, 1.0, -0.5] {
        let r = log_bmo_check(&Weight::power(1, alpha), &centers)?;
        println!("|x|^{alpha}: pass {} worst margin {:.4}", r.pass, r.worst_margin);
        for row in r.rows.iter().step_by(5) {
            println!("  x0 = {:>5}: oscillation {:.6} <= {:.6}", row.center, row.oscillation, row.bound);
        }
    }
    Ok(())
}
