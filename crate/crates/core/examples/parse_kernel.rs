//! Parse kernel expressions, print their canonical form and classify them
//! into the closed-form families.
//!
//! cargo run --example parse_kernel

use hardy_lab::expr::{parse, ClosedFormValue};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("1", 1),
        ("t1^(-1/2)", 1),
        ("3*t1*t2^2", 2),
        ("t1^(-1/4)*log(1/t1)", 1),
        ("(1-t1)^(-1/2)/sqrt(pi)", 1),
        ("exp(-t1)*t1^2", 1),
    ];
    for (text, n) in cases {
        let e = parse(text, n)?;
        let class = e.classify(n);
        let integral = match class.unit_cube_integral() {
            Some(ClosedFormValue::Finite(v)) => format!("{v:.12}"),
            Some(ClosedFormValue::Divergent) => "+inf".into(),
            None => "no closed form".into(),
        };
        println!("{text:28} -> {e}");
        println!("{:28}    class {class:?}", "");
        println!("{:28}    int over [0,1]^{n} = {integral}", "");
        println!("{:28}    value at t = 1/2: {}", "", e.eval_t(&vec![0.5; n])?);
    }
    match parse("t3", 2) {
        Err(err) => println!("t3 with n = 2 is rejected: {err}"),
        Ok(_) => println!("t3 with n = 2 was accepted"),
    }
    Ok(())
}
