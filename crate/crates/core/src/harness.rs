//! Sharpness experiments: epsilon sweeps of the extremal family, randomized
//! upper-bound checks, the Morrey power extremal and the commutator witness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{compute_constant, ConstantKind, ConstantOptions, SharpConstant};
use crate::error::{input, Result};
use crate::expr::Expr;
use crate::kernels::{
    check_beta_condition, check_morrey_balance, BalanceDirection, BetaReport, ConditionReport, Domain, KernelSpec,
    Mode, Scenario,
};
use crate::operators::{
    apply, apply_radial_closed_form, output_lp_norm, InputFunction, OperatorInstance, OutputOptions,
};
use crate::quad::QuadOptions;
use crate::spaces::{central_morrey_norm, lp_norm, make_witness_lp, morrey_power_norm, NormOptions, RadialFunction};
use crate::weights::Weight;

/// Default epsilon grid, decreasing.
pub const EPS_GRID: [f64; 5] = [0.1, 0.03, 0.01, 0.003, 0.001];

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub eps_grid: Vec<f64>,
    pub sharpness_tol: f64,
    pub upper_slack: f64,
    pub monotone_slack: f64,
    pub output: OutputOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            eps_grid: EPS_GRID.to_vec(),
            sharpness_tol: 0.02,
            upper_slack: 1e-6,
            monotone_slack: 1e-6,
            output: OutputOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    /// `None` when the point failed; see `error`.
    pub ratio: Option<f64>,
    pub output_norm: f64,
    pub input_norms: Vec<f64>,
    pub tail_error: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub scenario: String,
    pub target: Option<f64>,
    pub points: Vec<SweepPoint>,
    /// Polynomial extrapolation to `epsilon = 0` through the last three points.
    pub limit: Option<f64>,
    pub monotone: bool,
    pub below_target: bool,
    pub sharp: bool,
    pub beta: Option<BetaReport>,
    pub pass: bool,
}

impl SweepReport {
    /// Rows `epsilon,ratio,target,margin`.
    pub fn csv(&self) -> String {
        let mut out = String::from("epsilon,ratio,target,margin\n");
        let t = self.target.unwrap_or(f64::NAN);
        for p in &self.points {
            let r = p.ratio.unwrap_or(f64::NAN);
            out.push_str(&format!("{},{},{},{}\n", p.epsilon, r, t, t - r));
        }
        out
    }
}

/// Neville extrapolation of `(x_i, y_i)` to `x = 0`.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i]);
        }
    }
    p[0]
}

fn sweep_point(s: &Scenario, eps: f64, opts: &SweepOptions) -> SweepPoint {
    let run = || -> Result<SweepPoint> {
        let ws = make_witness_lp(s, eps)?;
        let inst = OperatorInstance::radial(s, ws.iter().map(|w| w.f.clone()).collect())?;
        let out = output_lp_norm(&inst, s.derived.p, &s.derived.weight, &opts.output)?;
        let norms: Vec<f64> = ws.iter().map(|w| w.norm).collect();
        let prod: f64 = norms.iter().product();
        let ratio = out.value / prod;
        let tail_error = out.tail_error / (out.finite_part + out.tail).max(1e-300) / s.derived.p * ratio;
        Ok(SweepPoint {
            epsilon: eps,
            ratio: out.value.is_finite().then_some(ratio),
            output_norm: out.value,
            input_norms: norms,
            tail_error,
            error: out.divergent.then(|| "output norm diverged".to_string()),
        })
    };
    run().unwrap_or_else(|e| SweepPoint {
        epsilon: eps,
        ratio: None,
        output_norm: f64::NAN,
        input_norms: Vec::new(),
        tail_error: f64::NAN,
        error: Some(e.to_string()),
    })
}

/// Ratios `||U(f_eps)|| / prod ||f_k,eps||` along the extremal family.
pub fn sharpness_sweep(s: &Scenario, opts: &SweepOptions) -> Result<SweepReport> {
    if s.mode != Mode::Lebesgue {
        return input("sharpness sweeps need a Lebesgue scenario");
    }
    if opts.eps_grid.windows(2).any(|w| w[1] >= w[0]) || opts.eps_grid.iter().any(|e| *e <= 0.0) {
        return input("epsilon grid must be positive and decreasing");
    }
    let a = compute_constant(ConstantKind::A, s, &ConstantOptions::default())?;
    let target = a.finite();
    let beta = s.kernel.beta.map(|b| check_beta_condition(&s.kernel, b, 33));
    let points: Vec<SweepPoint> = opts.eps_grid.par_iter().map(|&e| sweep_point(s, e, opts)).collect();
    let Some(t) = target else {
        return Ok(SweepReport {
            scenario: s.name.clone(),
            target,
            points,
            limit: None,
            monotone: false,
            below_target: false,
            sharp: false,
            beta,
            pass: false,
        });
    };
    let ratios: Vec<Option<f64>> = points.iter().map(|p| p.ratio).collect();
    let all = ratios.iter().all(Option::is_some);
    let r: Vec<f64> = ratios.iter().map(|r| r.unwrap_or(f64::NAN)).collect();
    let scale = t.abs().max(f64::MIN_POSITIVE);
    let below = all && r.iter().all(|x| *x <= t + opts.upper_slack * scale);
    let monotone = all && r.windows(2).all(|w| w[1] >= w[0] - opts.monotone_slack * scale);
    let last = *r.last().unwrap_or(&f64::NAN);
    let sharp = all && last >= (1.0 - opts.sharpness_tol) * t;
    let limit = (r.len() >= 3 && all).then(|| {
        let k = r.len() - 3;
        extrapolate_to_zero(&opts.eps_grid[k..], &r[k..])
    });
    Ok(SweepReport {
        scenario: s.name.clone(),
        target,
        points,
        limit,
        monotone,
        below_target: below,
        sharp,
        beta,
        pass: below && monotone && sharp,
    })
}

#[derive(Debug, Clone)]
pub struct FuzzOptions {
    pub trials: usize,
    pub seed: u64,
    pub max_m: usize,
    pub max_n: usize,
    pub max_d: usize,
    pub slack: f64,
    pub output: OutputOptions,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        FuzzOptions {
            trials: 100,
            seed: 0x5eed,
            max_m: 2,
            max_n: 2,
            max_d: 2,
            slack: 1e-6,
            output: OutputOptions {
                inner: QuadOptions::with_tol(1e-10),
                outer: QuadOptions::with_tol(1e-9),
                r_max_log2: 40.0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzTrial {
    pub trial: usize,
    pub seed: u64,
    pub scenario: Scenario,
    /// Input powers `g_k`; inputs are `|x|^{g_k}` on `|x| >= 1`.
    pub gammas: Vec<f64>,
    pub constant: f64,
    pub ratio: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzReport {
    pub trials: usize,
    pub seed: u64,
    pub max_ratio_over_constant: f64,
    pub violations: Vec<FuzzTrial>,
    pub records: Vec<FuzzTrial>,
    pub pass: bool,
}

/// A monomial scenario and cutoff power inputs with finite constant and
/// finite limit of the output profile.
pub fn random_scenario(rng: &mut ChaCha8Rng, opts: &FuzzOptions, name: &str) -> Result<(Scenario, Vec<f64>)> {
    for _ in 0..64 {
        let d = rng.gen_range(1..=opts.max_d);
        let m = rng.gen_range(1..=opts.max_m);
        let n = rng.gen_range(1..=opts.max_n);
        let powers = [0.5, 1.0, 2.0];
        let s: Vec<Expr> =
            (0..m).map(|_| Expr::t(rng.gen_range(1..=n)).powf(powers[rng.gen_range(0..powers.len())])).collect();
        let psi = Expr::product(
            std::iter::once(Expr::Const(rng.gen_range(0.5..2.0)))
                .chain((1..=n).map(|i| Expr::t(i).powf((rng.gen_range(-0.5..1.5f64) * 8.0).round() / 8.0 + 0.0)))
                .collect(),
        );
        let kernel = KernelSpec::new(psi, s, n, Domain::UnitCube)?;
        let df = d as f64;
        let weights: Vec<Weight> =
            (0..m).map(|_| Weight::power(d, (rng.gen_range(-0.5 * df..1.0) * 8.0).round() / 8.0 + 0.0)).collect();
        let p: Vec<f64> = (0..m).map(|_| (rng.gen_range(1.2 * m as f64..5.0) * 4.0).round() / 4.0).collect();
        let sc = Scenario::new(name, d, Mode::Lebesgue, kernel, weights, p, None, None)?;
        let a = compute_constant(ConstantKind::A, &sc, &ConstantOptions::default())?;
        if a.finite().is_none() {
            continue;
        }
        let gammas: Vec<f64> =
            (0..m).map(|k| -(df + sc.weights[k].degree) / sc.p[k] - rng.gen_range(0.02..0.4)).collect();
        let tail = Expr::product(sc.kernel.s.iter().zip(&gammas).map(|(s, g)| s.clone().abs().powf(*g)).collect());
        let class = Expr::product(vec![sc.kernel.psi.clone(), tail]).classify(n);
        if matches!(class.unit_cube_integral(), Some(crate::expr::ClosedFormValue::Finite(_))) {
            return Ok((sc, gammas));
        }
    }
    input("could not draw a scenario with finite constants")
}

fn fuzz_trial(i: usize, opts: &FuzzOptions) -> Result<FuzzTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(i as u64);
    let (s, gammas) = random_scenario(&mut rng, opts, &format!("fuzz-{i}"))?;
    let a = compute_constant(ConstantKind::A, &s, &ConstantOptions::default())?.finite().unwrap_or(f64::INFINITY);
    let inputs: Vec<RadialFunction> = gammas.iter().map(|g| RadialFunction::power(1.0, *g).with_inner(1.0)).collect();
    let no = NormOptions::default();
    let mut prod = 1.0;
    for (k, f) in inputs.iter().enumerate() {
        prod *= lp_norm(f, &s.weights[k], s.p[k], &no)?.value;
    }
    let inst = OperatorInstance::radial(&s, inputs)?;
    let out = output_lp_norm(&inst, s.derived.p, &s.derived.weight, &opts.output)?;
    let ratio = out.value / prod;
    Ok(FuzzTrial {
        trial: i,
        seed: opts.seed,
        scenario: s,
        gammas,
        constant: a,
        ratio,
        // NaN ratios count as violations
        violation: ratio.partial_cmp(&(a * (1.0 + opts.slack))).is_none_or(|o| o.is_gt()),
    })
}

/// `||U(f)|| <= A prod ||f_k||` on seeded random monomial scenarios.
pub fn upper_bound_fuzz(opts: &FuzzOptions) -> Result<FuzzReport> {
    let records: Vec<FuzzTrial> =
        (0..opts.trials).into_par_iter().map(|i| fuzz_trial(i, opts)).collect::<Result<_>>()?;
    let max = records.iter().map(|r| r.ratio / r.constant).fold(0.0, f64::max);
    let violations: Vec<FuzzTrial> = records.iter().filter(|r| r.violation).cloned().collect();
    Ok(FuzzReport {
        trials: opts.trials,
        seed: opts.seed,
        max_ratio_over_constant: max,
        pass: violations.is_empty(),
        violations,
        records,
    })
}

#[derive(Debug, Clone)]
pub struct ExtremalOptions {
    pub norm: NormOptions,
    pub tol: f64,
    pub flat_tol: f64,
}

impl Default for ExtremalOptions {
    fn default() -> Self {
        ExtremalOptions { norm: NormOptions::default(), tol: 1e-6, flat_tol: 1e-10 }
    }
}

fn max_spread(v: &[f64]) -> f64 {
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    if hi == 0.0 {
        0.0
    } else {
        (hi - lo) / hi.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorreyExtremalReport {
    pub scenario: String,
    pub constant: SharpConstant,
    pub output_norm: f64,
    pub input_norms: Vec<f64>,
    pub measured_ratio: f64,
    /// `||f_0|| / prod ||f_k||` from the power-norm closed forms.
    pub normalization: f64,
    pub predicted_ratio: f64,
    pub rel_diff: f64,
    pub bracket_spread: f64,
    pub necessity: ConditionReport,
    pub sufficiency: ConditionReport,
    /// `measured <= B` exactly when the necessity slack is nonnegative.
    pub direction_consistent: bool,
    pub pass: bool,
}

/// `f_k = |x|^{(d+a_k) l_k}`: the output is `B |x|^{(d+a) l}` and the norm
/// ratio is `B` times the power-norm normalization.
pub fn morrey_extremal_check(s: &Scenario, opts: &ExtremalOptions) -> Result<MorreyExtremalReport> {
    if s.mode != Mode::Morrey {
        return input("Morrey extremal check needs a Morrey scenario");
    }
    let lam = s.lambda.as_ref().expect("Morrey scenario has lambda");
    let lam_out = s.derived.lambda.expect("Morrey scenario has lambda");
    let b = compute_constant(ConstantKind::B, s, &ConstantOptions::default())?;
    let df = s.d as f64;
    let inputs: Vec<RadialFunction> =
        (0..s.m()).map(|k| RadialFunction::power(1.0, (df + s.weights[k].degree) * lam[k])).collect();
    let inst = OperatorInstance::radial(s, inputs.clone())?;
    let cf = apply_radial_closed_form(&inst, false, &opts.norm.quad)?;
    let necessity = check_morrey_balance(s, BalanceDirection::Necessity)?;
    let sufficiency = check_morrey_balance(s, BalanceDirection::Sufficiency)?;
    let mut norms = Vec::with_capacity(s.m());
    let mut spread = 0.0f64;
    let mut normalization = morrey_power_norm(&s.derived.weight, s.derived.p, lam_out)?;
    for (k, f) in inputs.iter().enumerate() {
        let n = central_morrey_norm(f, &s.weights[k], s.p[k], lam[k], &opts.norm)?;
        spread = spread.max(max_spread(&n.brackets));
        normalization /= morrey_power_norm(&s.weights[k], s.p[k], lam[k])?;
        norms.push(n.value);
    }
    let (output, out_spread) = match cf.coefficient {
        Some(c) => {
            let g = RadialFunction::power(c, cf.exponent);
            let n = central_morrey_norm(&g, &s.derived.weight, s.derived.p, lam_out, &opts.norm)?;
            (if n.divergent { f64::INFINITY } else { n.value }, max_spread(&n.brackets))
        }
        None => (f64::INFINITY, f64::INFINITY),
    };
    spread = spread.max(out_spread);
    let measured = output / norms.iter().product::<f64>();
    let bv = b.finite().unwrap_or(f64::INFINITY);
    let predicted = bv * normalization;
    let rel_diff = if predicted == 0.0 { measured.abs() } else { (measured - predicted).abs() / predicted.abs() };
    // the necessity slack has the sign of N - 1 with N = rhs / lhs
    let gap = measured / bv - 1.0;
    let n_cond = necessity.rhs / necessity.lhs - 1.0;
    let direction_consistent = measured.is_finite()
        && (gap <= opts.tol) == (n_cond <= opts.tol)
        && (gap >= -opts.tol) == (n_cond >= -opts.tol);
    Ok(MorreyExtremalReport {
        scenario: s.name.clone(),
        constant: b,
        output_norm: output,
        input_norms: norms,
        measured_ratio: measured,
        normalization,
        predicted_ratio: predicted,
        rel_diff,
        bracket_spread: spread,
        pass: measured.is_finite() && rel_diff <= opts.tol && spread <= opts.flat_tol && direction_consistent,
        necessity,
        sufficiency,
        direction_consistent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCheck {
    pub x: Vec<f64>,
    pub quadrature: f64,
    pub closed_form: f64,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutatorWitnessReport {
    pub scenario: String,
    /// `int prod |s_k|^{g_k} log(1/|s_k|) psi dt`.
    pub witness_integral: Option<f64>,
    pub witness_quadrature: Option<f64>,
    pub exponent: f64,
    pub points: Vec<PointCheck>,
    pub pointwise_max_rel: f64,
    pub pointwise_pass: bool,
    pub output_norm: f64,
    pub input_norms: Vec<f64>,
    pub measured_ratio: f64,
    pub normalization: f64,
    pub predicted_ratio: f64,
    /// The output bracket is independent of `R`; fails for weighted slots
    /// whose degrees do not balance.
    pub output_bracket_flat: bool,
    pub ratio_pass: bool,
    pub c: SharpConstant,
    pub d: SharpConstant,
    /// `sup |s_k| < 1` on the sampled cube.
    pub separated: bool,
    pub finiteness_pass: bool,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct WitnessOptions {
    pub seed: u64,
    pub points: usize,
    pub point_tol: f64,
    pub ratio_tol: f64,
    pub norm: NormOptions,
    pub quad: QuadOptions,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            seed: 7,
            points: 16,
            point_tol: 1e-4,
            ratio_tol: 1e-3,
            norm: NormOptions::default(),
            quad: QuadOptions::with_tol(1e-10),
        }
    }
}

/// Sample points `x != 0` with log-uniform radii in `[1/8, 8]`.
pub fn sample_points(d: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let dir: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
            let nrm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
            let r = 2f64.powf(rng.gen_range(-3.0..3.0));
            dir.iter().map(|v| v / nrm * r).collect()
        })
        .collect()
}

/// `b_k = log|x|`, `f_k = |x|^{(d+a_k) l_k}`.
pub fn commutator_witness_check(s: &Scenario, opts: &WitnessOptions) -> Result<CommutatorWitnessReport> {
    if s.mode != Mode::Commutator {
        return input("commutator witness needs a commutator scenario");
    }
    let lam = s.lambda.as_ref().expect("commutator scenario has lambda");
    let lam_out = s.derived.lambda.expect("commutator scenario has lambda");
    let df = s.d as f64;
    let inputs: Vec<RadialFunction> =
        (0..s.m()).map(|k| RadialFunction::power(1.0, (df + s.weights[k].degree) * lam[k])).collect();
    let symbols = vec![RadialFunction::new(Expr::Radius.ln()); s.m()];
    let inst = OperatorInstance::commutator(s, inputs.iter().cloned().map(InputFunction::Radial).collect(), symbols)?;
    let cf = apply_radial_closed_form(&inst, false, &opts.quad)?;
    let cq = apply_radial_closed_form(&inst, true, &opts.quad)?;
    let w = cf.coefficient;
    let points: Vec<PointCheck> = sample_points(s.d, opts.points, opts.seed)
        .into_par_iter()
        .map(|x| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let q = apply(&inst, &x, &opts.quad).map(|q| q.value).unwrap_or(f64::NAN);
            let c = w.unwrap_or(f64::INFINITY) * r.powf(cf.exponent);
            let rel = if c == 0.0 { q.abs() } else { (q - c).abs() / c.abs() };
            PointCheck { x, quadrature: q, closed_form: c, rel_diff: rel }
        })
        .collect();
    let max_rel = points.iter().map(|p| p.rel_diff).fold(0.0, f64::max);
    let pointwise_pass = w.is_some() && max_rel <= opts.point_tol;

    let mut norms = Vec::with_capacity(s.m());
    let mut normalization = morrey_power_norm(&s.derived.weight, s.derived.p, lam_out)?;
    for (k, f) in inputs.iter().enumerate() {
        norms.push(central_morrey_norm(f, &s.weights[k], s.p[k], lam[k], &opts.norm)?.value);
        normalization /= morrey_power_norm(&s.weights[k], s.p[k], lam[k])?;
    }
    let (output, flat) = match w {
        Some(c) => {
            let n = central_morrey_norm(
                &RadialFunction::power(c, cf.exponent),
                &s.derived.weight,
                s.derived.p,
                lam_out,
                &opts.norm,
            )?;
            let flat = !n.divergent && max_spread(&n.brackets) <= 1e-10;
            (if n.divergent { f64::INFINITY } else { n.value }, flat)
        }
        None => (f64::INFINITY, false),
    };
    let measured = output / norms.iter().product::<f64>();
    let predicted = w.unwrap_or(f64::INFINITY) * normalization;
    let ratio_pass = flat
        && if predicted == 0.0 {
            measured == 0.0
        } else {
            (measured - predicted).abs() <= opts.ratio_tol * predicted.abs()
        };

    let co = ConstantOptions { skip_variant: true, ..Default::default() };
    let c = compute_constant(ConstantKind::C, s, &co)?;
    let dk = compute_constant(ConstantKind::D, s, &co)?;
    let sup = s
        .kernel
        .sample_points(4096)
        .iter()
        .chain(std::iter::once(&vec![1.0; s.kernel.n]))
        .flat_map(|t| s.kernel.s.iter().map(move |sk| sk.eval_t(t).map(f64::abs).unwrap_or(f64::INFINITY)))
        .fold(0.0, f64::max);
    let separated = sup < 1.0;
    let finiteness_pass = !(measured.is_finite() && dk.divergent) && (!separated || c.divergent == dk.divergent);
    Ok(CommutatorWitnessReport {
        scenario: s.name.clone(),
        witness_integral: w,
        witness_quadrature: cq.coefficient,
        exponent: cf.exponent,
        points,
        pointwise_max_rel: max_rel,
        pointwise_pass,
        output_norm: output,
        input_norms: norms,
        measured_ratio: measured,
        normalization,
        predicted_ratio: predicted,
        output_bracket_flat: flat,
        ratio_pass,
        c,
        d: dk,
        separated,
        finiteness_pass,
        pass: pointwise_pass && ratio_pass && finiteness_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn hardy() -> Scenario {
        Scenario::lebesgue("hardy", 1, KernelSpec::coordinate(1), vec![2.0]).unwrap()
    }

    #[test]
    fn neville() {
        let xs = [0.3, 0.2, 0.1];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 3.0 * x + x * x).collect();
        assert!((extrapolate_to_zero(&xs, &ys) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hardy_sweep_matches_semi_analytic_ratios() {
        let r = sharpness_sweep(&hardy(), &SweepOptions::default()).unwrap();
        assert!(r.pass, "{r:?}");
        for p in &r.points {
            let (e, c) = (p.epsilon, 0.5 - p.epsilon);
            let sq = 2.0 * e / (c * c) * (1.0 / (2.0 * e) - 2.0 / (c + 2.0 * e) + 1.0 / (2.0 * c + 2.0 * e));
            assert!(rel(p.ratio.unwrap(), sq.sqrt()) < 1e-7, "{p:?}");
        }
        assert!((r.limit.unwrap() - 2.0).abs() < 1e-3);
        assert!(r.csv().starts_with("epsilon,ratio,target,margin\n"));
    }

    #[test]
    fn zero_kernel_sweep() {
        let k = KernelSpec::parse("0", &["t1"], 1, Domain::UnitCube).unwrap();
        let s = Scenario::lebesgue("zero", 1, k, vec![2.0]).unwrap();
        let r = sharpness_sweep(&s, &SweepOptions::default()).unwrap();
        assert_eq!(r.target, Some(0.0));
        assert!(r.points.iter().all(|p| p.ratio == Some(0.0)));
        assert!(r.pass);
    }

    #[test]
    fn fuzz_is_deterministic_and_clean() {
        let o = FuzzOptions { trials: 6, ..Default::default() };
        let a = upper_bound_fuzz(&o).unwrap();
        let b = upper_bound_fuzz(&o).unwrap();
        assert_eq!(a, b);
        assert!(a.pass, "{:?}", a.violations);
        assert!(a.max_ratio_over_constant < 1.0);
    }

    #[test]
    fn morrey_extremal_unweighted() {
        let k = KernelSpec::coordinate(2);
        let w = vec![Weight::unweighted(1); 2];
        let s = Scenario::new("mo", 1, Mode::Morrey, k, w, vec![4.0, 4.0], None, Some(vec![-0.125, -0.125])).unwrap();
        let r = morrey_extremal_check(&s, &ExtremalOptions::default()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(rel(r.measured_ratio, r.constant.value.unwrap()) < 1e-12);
        // unequal lambda_k p_k: strict loss in the ratio
        let k = KernelSpec::coordinate(2);
        let w = vec![Weight::unweighted(1); 2];
        let s = Scenario::new("mo2", 1, Mode::Morrey, k, w, vec![4.0, 4.0], None, Some(vec![-0.05, -0.2])).unwrap();
        let r = morrey_extremal_check(&s, &ExtremalOptions::default()).unwrap();
        assert!(r.pass && r.direction_consistent, "{r:?}");
        assert!(r.normalization < 1.0);
    }

    #[test]
    fn commutator_witness() {
        let k = KernelSpec::coordinate(1);
        let s = Scenario::new(
            "cw",
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
        assert!(r.pass, "{r:?}");
        assert!(rel(r.witness_integral.unwrap(), 16.0 / 9.0) < 1e-14);
        assert!(rel(r.witness_quadrature.unwrap(), 16.0 / 9.0) < 1e-8);
    }
}
