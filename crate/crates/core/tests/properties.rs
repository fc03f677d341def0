//! Property tests for the invariants of the expression language, weights,
//! quadrature, norms and the operator evaluator.

use std::sync::Arc;

use hardy_lab::expr::{parse, ClosedFormClass, Expr};
use hardy_lab::kernels::{Domain, KernelSpec, Scenario};
use hardy_lab::operators::{apply, InputFunction, OperatorInstance};
use hardy_lab::quad::{integrate_unit_cube, AxisHint, FaceHints, QuadOptions};
use hardy_lab::spaces::{central_morrey_norm, lp_norm, NormOptions, RadialFunction};
use hardy_lab::weights::{Angular, Weight};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

fn interior_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(0.01..0.99)).collect()).collect()
}

/// Expressions in `t1, t2` that stay positive and finite on `(0,1)^2`.
fn positive_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("t1".to_string()),
        Just("t2".to_string()),
        Just("pi".to_string()),
        (1u32..40).prop_map(|k| format!("{}", k as f64 / 8.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} * {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} / ({b})")),
            (inner.clone(), -16i32..16).prop_map(|(a, k)| format!("({a})^({})", k as f64 / 8.0)),
            inner.clone().prop_map(|a| format!("exp(-({a}))")),
            inner.clone().prop_map(|a| format!("log(1 + {a})")),
            inner.clone().prop_map(|a| format!("sqrt({a})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("min({a}, {b})")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("abs({a} - 2 * {b}) + 1")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_then_parse_round_trips(text in positive_expr()) {
        let e = parse(&text, 2).unwrap();
        let back = parse(&e.to_string(), 2).unwrap();
        for t in interior_points(2, 64, 3) {
            let (a, b) = (e.eval_t(&t).unwrap(), back.eval_t(&t).unwrap());
            prop_assert!(rel(a, b) <= 1e-12, "{text} -> {e}: {a} vs {b}");
        }
    }

    #[test]
    fn classification_is_sound(
        c in 1u32..20,
        a in proptest::collection::vec(-12i32..20, 2),
        logs in proptest::collection::vec(0u32..3, 2),
    ) {
        let mut text = format!("{}", c as f64 / 4.0);
        for i in 0..2 {
            text += &format!(" * t{}^({})", i + 1, a[i] as f64 / 8.0);
            for _ in 0..logs[i] {
                text += &format!(" * log(1/t{})", i + 1);
            }
        }
        let e = parse(&text, 2).unwrap();
        let class = e.classify(2);
        prop_assert!(!matches!(class, ClosedFormClass::General), "{text}");
        for t in interior_points(2, 64, 5) {
            let (x, y) = (e.eval_t(&t).unwrap(), class.eval(&t));
            prop_assert!(rel(x, y) <= 1e-12, "{text}: {x} vs {y}");
        }
    }

    #[test]
    fn weights_are_homogeneous(
        d in 1usize..4,
        degree in -0.9f64..3.0,
        scale in 0.1f64..4.0,
        exponent in 0.0f64..3.0,
        t in prop_oneof![-8.0f64..-0.05, 0.05f64..8.0],
        x in proptest::collection::vec(-3.0f64..3.0, 3),
    ) {
        let x = &x[..d];
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-4);
        let first = Weight { d, degree, angular: Angular::FirstCoordinate { scale, exponent } };
        let power = Weight::scaled_power(d, scale, degree);
        for w in [first, power] {
            let wx = w.eval(x).unwrap();
            let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
            let want = t.abs().powf(degree) * wx;
            prop_assert!((w.eval(&tx).unwrap() - want).abs() <= 1e-12 * want.max(1e-300));
        }
    }

    #[test]
    fn ball_integrals_scale(d in 1usize..4, degree in -0.9f64..2.0, r in 0.05f64..20.0, s in 0.05f64..20.0) {
        let w = Weight::power(d, degree);
        let a = w.ball_integral(s * r).unwrap();
        let b = s.powf(d as f64 + degree) * w.ball_integral(r).unwrap();
        prop_assert!(rel(a, b) <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn positive_combinations_stay_homogeneous(
        theta in 0.1f64..3.0,
        mu in 0.1f64..3.0,
        degree in -0.5f64..2.0,
        t in 0.1f64..6.0,
        x in proptest::collection::vec(-2.0f64..2.0, 2),
    ) {
        prop_assume!(x[0].abs() + x[1].abs() > 1e-2);
        let w1 = Weight::power(2, degree);
        let w2 = Weight { d: 2, degree, angular: Angular::FirstCoordinate { scale: 1.0, exponent: 2.0 } };
        let w = Weight::combination(vec![(theta, w1.clone()), (mu, w2.clone())]).unwrap();
        prop_assert_eq!(w.degree, degree);
        let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
        prop_assert!(rel(w.eval(&tx).unwrap(), t.powf(degree) * w.eval(&x).unwrap()) <= 1e-12);
        let s = theta * w1.sphere_integral().unwrap() + mu * w2.sphere_integral().unwrap();
        prop_assert!(rel(w.sphere_integral().unwrap(), s) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lp_norm_is_homogeneous(c in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0], a in -0.4f64..2.0, p in 1.0f64..4.0) {
        let profile = parse(&format!("r^({a}) * exp(-r)"), 0).unwrap();
        let f = RadialFunction::new(profile);
        let w = Weight::power(2, 0.5);
        let opts = NormOptions::default();
        let n1 = lp_norm(&f, &w, p, &opts).unwrap().value;
        let nc = lp_norm(&f.scaled(c), &w, p, &opts).unwrap().value;
        prop_assert!(rel(nc, c.abs() * n1) <= 1e-12, "{nc} vs {}", c.abs() * n1);
    }

    #[test]
    fn morrey_brackets_of_powers_are_flat(
        d in 1usize..4,
        degree in -0.5f64..2.0,
        p in 1.0f64..5.0,
        frac in 0.05f64..1.0,
    ) {
        let lambda = -frac / p;
        let w = Weight::power(d, degree);
        let f = RadialFunction::power(1.0, (d as f64 + degree) * lambda);
        let opts = NormOptions { force_quadrature: true, ..Default::default() };
        let n = central_morrey_norm(&f, &w, p, lambda, &opts).unwrap();
        let hi = n.brackets.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = n.brackets.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!((hi - lo) / hi <= 1e-10, "spread {}", (hi - lo) / hi);
    }

    #[test]
    fn quadrature_is_deterministic(a in -0.9f64..0.5, b in -0.9f64..0.5) {
        let hints = FaceHints::guessed(vec![AxisHint::at_zero(a), AxisHint::at_zero(b)]);
        let f = |t: &[f64]| t[0].powf(a) * t[1].powf(b) * (t[0] + t[1]).cos();
        let opts = QuadOptions::with_tol(1e-9);
        let x = integrate_unit_cube(f, 2, &hints, &opts);
        let y = integrate_unit_cube(f, 2, &hints, &opts);
        prop_assert_eq!(x.value.to_bits(), y.value.to_bits());
        prop_assert_eq!(x, y);
    }
}

fn two_slot(d: usize, psi: &str, s: &[&str]) -> Scenario {
    let k = KernelSpec::parse(psi, s, 2, Domain::UnitCube).unwrap();
    Scenario::lebesgue("prop", d, k, vec![4.0, 4.0]).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn apply_is_linear_in_each_slot(seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0, slot in 0usize..2) {
        let s = two_slot(2, "1 + t1 * t2", &["t1", "t2^2"]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c1: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c2: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = Arc::new(move |y: &[f64]| (-(y[0] - c1[0]).powi(2) - (y[1] - c1[1]).powi(2)).exp());
        let g = Arc::new(move |y: &[f64]| 1.0 / (1.0 + (y[0] - c2[0]).powi(2) + y[1].powi(2)));
        let h = InputFunction::point(|y: &[f64]| (y[0] + 2.0 * y[1]).cos());
        let (f1, g1) = (f.clone(), g.clone());
        let mix = InputFunction::point(move |y: &[f64]| a * f1(y) + b * g1(y));
        let (f2, g2) = (f.clone(), g.clone());
        let only_f = InputFunction::point(move |y: &[f64]| f2(y));
        let only_g = InputFunction::point(move |y: &[f64]| g2(y));
        let place = |x: InputFunction| if slot == 0 { vec![x, h.clone()] } else { vec![h.clone(), x] };
        let q = QuadOptions::with_tol(1e-12);
        let x = random_point(&mut rng, 2);
        let um = apply(&OperatorInstance::new(&s, place(mix)).unwrap(), &x, &q).unwrap().value;
        let uf = apply(&OperatorInstance::new(&s, place(only_f)).unwrap(), &x, &q).unwrap().value;
        let ug = apply(&OperatorInstance::new(&s, place(only_g)).unwrap(), &x, &q).unwrap().value;
        let want = a * uf + b * ug;
        let scale = a.abs() * uf.abs() + b.abs() * ug.abs();
        prop_assert!((um - want).abs() <= 1e-10 * scale.max(1e-300), "{um} vs {want}");
    }

    #[test]
    fn homogeneity_transport(
        g1 in -0.6f64..0.5,
        g2 in -0.6f64..0.5,
        seed in 0u64..1000,
    ) {
        let s = two_slot(2, "t1^(1/2) * (1 + t2)", &["t1", "t1 * t2"]);
        let inst = OperatorInstance::radial(&s, vec![RadialFunction::power(1.0, g1), RadialFunction::power(2.0, g2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (random_point(&mut rng, 2), random_point(&mut rng, 2));
        let q = QuadOptions::with_tol(1e-11);
        let ux = apply(&inst, &x, &q).unwrap().value;
        let uy = apply(&inst, &y, &q).unwrap().value;
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let want = (norm(&x) / norm(&y)).powf(g1 + g2);
        prop_assert!(rel(ux / uy, want) <= 1e-8, "{} vs {want}", ux / uy);
    }
}

/// Composite Gauss-Legendre on `[0,1]^2`, independent of the library's
/// adaptive rules.
fn tensor_gauss(f: impl Fn(f64, f64) -> f64, panels: usize) -> f64 {
    const X: [f64; 5] =
        [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.236_926_885_056_189,
        0.478_628_670_499_366,
        0.568_888_888_888_889,
        0.478_628_670_499_366,
        0.236_926_885_056_189,
    ];
    let h = 1.0 / panels as f64;
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|i| X.iter().zip(W).map(move |(x, w)| (h * (i as f64 + 0.5 + 0.5 * x), 0.5 * h * w)))
        .collect();
    nodes.iter().map(|&(u, wu)| wu * nodes.iter().map(|&(v, wv)| wv * f(u, v)).sum::<f64>()).sum()
}

#[test]
fn reduces_to_the_plain_multilinear_operator() {
    // n = m, s_k = t_k: U(f1, f2)(x) = int f1(t1 x) f2(t2 x) psi(t1, t2) dt
    let psi_text = "(1 + t1) * t2^2 + 1/2";
    let psi = parse(psi_text, 2).unwrap();
    let s = two_slot(2, psi_text, &["t1", "t2"]);
    let f1 = |y: &[f64]| (-(y[0] * y[0] + 0.5 * y[1] * y[1])).exp();
    let f2 = |y: &[f64]| 1.0 / (1.0 + (y[0] - 0.3).powi(2) + (y[1] + 0.2).powi(2));
    let inst = OperatorInstance::new(&s, vec![InputFunction::point(f1), InputFunction::point(f2)]).unwrap();
    let q = QuadOptions::with_tol(1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..16 {
        let x = random_point(&mut rng, 2);
        let direct = tensor_gauss(
            |t1, t2| {
                let y1 = [t1 * x[0], t1 * x[1]];
                let y2 = [t2 * x[0], t2 * x[1]];
                f1(&y1) * f2(&y2) * psi.eval_t(&[t1, t2]).unwrap()
            },
            40,
        );
        let got = apply(&inst, &x, &q).unwrap().value;
        assert!(rel(got, direct) < 1e-9, "x = {x:?}: {got} vs {direct}");
    }
}

#[test]
fn radial_expression_profiles_are_radial() {
    let f = RadialFunction::new(Expr::product(vec![Expr::radius().powf(-0.5), Expr::radius().ln().abs()]));
    let a = f.eval_point(&[3.0, 4.0]).unwrap();
    assert!(rel(a, f.eval(5.0).unwrap()) < 1e-15);
}
