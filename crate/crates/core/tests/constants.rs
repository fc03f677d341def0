//! Sharp constants against independent oracles and structural properties.

use hardy_lab::constants::{compute_constant, ConstantKind, ConstantOptions, Method};
use hardy_lab::harness::{commutator_witness_check, morrey_extremal_check, ExtremalOptions, WitnessOptions};
use hardy_lab::kernels::{Domain, KernelSpec, Mode, Scenario};
use hardy_lab::weights::Weight;
use proptest::prelude::*;
use statrs::function::beta::beta;
use statrs::function::gamma::gamma;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn forced() -> ConstantOptions {
    ConstantOptions { force_quadrature: true, ..Default::default() }
}

#[test]
fn riesz_kernel_matches_beta_oracle() {
    for alpha in [0.5, 1.5, 2.5] {
        for p in [1.5, 2.0, 4.0] {
            let psi = format!("(1-t1)^({})/{}", alpha - 1.0, gamma(alpha));
            let k = KernelSpec::parse(&psi, &["t1"], 1, Domain::UnitCube).unwrap();
            let s = Scenario::lebesgue("riesz", 1, k, vec![p]).unwrap();
            let c = compute_constant(ConstantKind::A, &s, &ConstantOptions::default()).unwrap();
            let want = beta(1.0 - 1.0 / p, alpha) / gamma(alpha);
            assert!(rel(c.value.unwrap(), want) < 1e-7, "alpha={alpha} p={p}: {:?} vs {want}", c.value);
        }
    }
}

#[test]
fn weighted_constant_uses_slot_degrees() {
    // A = int prod t_k^{-(d+a_k)/p_k} dt = prod 1/(1 - (d+a_k)/p_k)
    let w = vec![Weight::power(2, 1.0), Weight::power(2, -0.5)];
    let s = Scenario::new("w", 2, Mode::Lebesgue, KernelSpec::coordinate(2), w, vec![6.0, 3.0], None, None).unwrap();
    let want = 1.0 / (1.0 - 3.0 / 6.0) / (1.0 - 1.5 / 3.0);
    for opts in [ConstantOptions::default(), forced()] {
        let c = compute_constant(ConstantKind::A, &s, &opts).unwrap();
        assert!(rel(c.value.unwrap(), want) < 1e-8, "{c:?}");
    }
}

#[test]
fn hausdorff_kind_requires_orthant_kernel() {
    let s = Scenario::lebesgue("h", 1, KernelSpec::coordinate(1), vec![2.0]).unwrap();
    assert!(compute_constant(ConstantKind::AStar, &s, &ConstantOptions::default()).is_err());
}

#[test]
fn b_reports_the_printed_variant() {
    let w = vec![Weight::unweighted(1)];
    let s =
        Scenario::new("b", 1, Mode::Morrey, KernelSpec::coordinate(1), w, vec![2.0], None, Some(vec![-0.25])).unwrap();
    let b = compute_constant(ConstantKind::B, &s, &ConstantOptions::default()).unwrap();
    assert!(rel(b.value.unwrap(), 1.0 / (1.0 - 0.25)) < 1e-14);
    let printed = b.as_printed.as_ref().unwrap();
    assert!(rel(printed.value.unwrap(), 1.0 / (1.0 + 0.125)) < 1e-14);
}

#[test]
fn single_slot_morrey_extremal_is_exact_for_power_weights() {
    for (d, alpha) in [(1, 0.5), (2, -1.0), (3, 2.0)] {
        let w = vec![Weight::power(d, alpha)];
        let s = Scenario::new("m1", d, Mode::Morrey, KernelSpec::coordinate(1), w, vec![3.0], None, Some(vec![-0.1]))
            .unwrap();
        let r = morrey_extremal_check(&s, &ExtremalOptions::default()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.rel_diff < 1e-12 && (r.normalization - 1.0).abs() < 1e-12);
    }
}

#[test]
fn zero_kernel_commutator_witness() {
    let k = KernelSpec::parse("0", &["t1"], 1, Domain::UnitCube).unwrap();
    let s = Scenario::new(
        "zero",
        1,
        Mode::Commutator,
        k,
        vec![Weight::unweighted(1)],
        vec![2.0],
        Some(vec![4.0]),
        Some(vec![-0.25]),
    )
    .unwrap();
    let r = commutator_witness_check(&s, &WitnessOptions::default()).unwrap();
    assert_eq!(r.witness_integral, Some(0.0));
    assert_eq!(r.measured_ratio, 0.0);
}

fn monomial(c: f64, a: &[f64]) -> String {
    let mut s = format!("{c}");
    for (i, ai) in a.iter().enumerate() {
        s += &format!("*t{}^({ai})", i + 1);
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_agrees_with_quadrature(
        a in proptest::collection::vec(-4i32..12, 2),
        p in proptest::collection::vec(4u32..16, 2),
    ) {
        let a: Vec<f64> = a.iter().map(|x| *x as f64 / 8.0).collect();
        let p: Vec<f64> = p.iter().map(|x| *x as f64 / 2.0).collect();
        let k = KernelSpec::parse(&monomial(1.5, &a), &["t1", "t2"], 2, Domain::UnitCube).unwrap();
        let s = Scenario::lebesgue("agree", 1, k, p.clone()).unwrap();
        let cf = compute_constant(ConstantKind::A, &s, &ConstantOptions::default()).unwrap();
        let qu = compute_constant(ConstantKind::A, &s, &forced()).unwrap();
        prop_assert_eq!(cf.method, Method::ClosedForm);
        let want = 1.5 * (0..2).map(|k| 1.0 / (a[k] + 1.0 - 1.0 / p[k])).product::<f64>();
        prop_assert!(rel(cf.value.unwrap(), want) < 1e-12);
        prop_assert!(rel(qu.value.unwrap(), want) < 1e-6, "{:?} vs {want}", qu.value);
    }

    #[test]
    fn constant_grows_with_inverse_exponents(
        a in -2i32..8,
        e in 1u32..3,
        p1 in 3u32..12,
        dp in 1u32..8,
    ) {
        // |s| = t^e <= 1, so raising 1/p raises |s|^{-1/p}
        let psi = format!("t1^({})", a as f64 / 8.0);
        let s_text = format!("t1^{e}");
        let mut last = 0.0;
        for p in [(p1 + dp) as f64 / 2.0, p1 as f64 / 2.0] {
            let k = KernelSpec::parse(&psi, &[s_text.as_str()], 1, Domain::UnitCube).unwrap();
            let s = Scenario::lebesgue("mono", 1, k, vec![p]).unwrap();
            let v = compute_constant(ConstantKind::A, &s, &ConstantOptions::default()).unwrap().value.unwrap_or(f64::INFINITY);
            prop_assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn c_and_d_are_finite_together_when_separated(a in -16i32..16, c in 1u32..8) {
        // |s| = c t / 8 <= 7/8 keeps |log|s|| bounded below
        let psi = format!("t1^({})", a as f64 / 8.0);
        let s_text = format!("{}*t1", c as f64 / 8.0);
        let k = KernelSpec::parse(&psi, &[s_text.as_str()], 1, Domain::UnitCube).unwrap();
        let w = vec![Weight::unweighted(1), Weight::unweighted(1)];
        let k2 = KernelSpec::new(k.psi.clone(), vec![k.s[0].clone(), k.s[0].clone()], 1, Domain::UnitCube).unwrap();
        let s = Scenario::new("cd", 1, Mode::Commutator, k2, w, vec![4.0, 4.0], Some(vec![8.0, 8.0]), Some(vec![-0.125, -0.125])).unwrap();
        let cc = compute_constant(ConstantKind::C, &s, &ConstantOptions::default()).unwrap();
        let dd = compute_constant(ConstantKind::D, &s, &ConstantOptions::default()).unwrap();
        prop_assert_eq!(cc.value.is_some(), dd.value.is_some());
        // exponent of t: a/8 + 2 (d+a_k) l_k = a/8 - 1/4
        prop_assert_eq!(cc.value.is_some(), a as f64 / 8.0 - 0.25 > -1.0);
    }
}
