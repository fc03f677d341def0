//! Structural conditions: the dilation lower bound, the weight-product
//! condition and the two Morrey balance conditions.
//!
//! cargo run --example conditions

use hardy_lab::kernels::{
    check_beta_condition, check_morrey_balance, check_walpha_condition, BalanceDirection, Domain, KernelSpec, Mode,
    Scenario,
};
use hardy_lab::weights::Weight;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = KernelSpec::parse("1", &["t1*t2", "t2^2"], 2, Domain::UnitCube)?;
    for beta in [1.0, 2.0] {
        let r = check_beta_condition(&k, beta, 32);
        println!("beta = {beta}: pass {} (worst margin {:.3e} at {:?})", r.pass, r.worst_margin, r.witness);
    }

    let w = vec![Weight::scaled_power(2, 2.0, 1.0), Weight::power(2, -0.5)];
    let s = Scenario::new("walpha", 2, Mode::Lebesgue, KernelSpec::coordinate(2), w, vec![3.0, 3.0], None, None)?;
    let r = check_walpha_condition(&s)?;
    println!("weight product: lhs {:.12} rhs {:.12} pass {}", r.lhs, r.rhs, r.pass);

    for lambda in [vec![-0.125, -0.125], vec![-0.05, -0.2]] {
        let w = vec![Weight::unweighted(1); 2];
        let s = Scenario::new(
            "balance",
            1,
            Mode::Morrey,
            KernelSpec::coordinate(2),
            w,
            vec![4.0, 4.0],
            None,
            Some(lambda.clone()),
        )?;
        for dir in [BalanceDirection::Sufficiency, BalanceDirection::Necessity] {
            let r = check_morrey_balance(&s, dir)?;
            println!("lambda {lambda:?} {dir:?}: slack {:+.3e} pass {}", r.slack, r.pass);
        }
    }
    Ok(())
}
