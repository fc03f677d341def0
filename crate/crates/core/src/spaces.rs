//! Weighted Lebesgue, central Morrey and central mean-oscillation norms of
//! radial functions, by exact polar reduction
//! `int_{B(0,R)} F(|x|) w(x) dx = w(S_d) int_0^R F(r) r^{d+alpha-1} dr`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::expr::{Endpoint, Expr, VarRef};
use crate::kernels::Scenario;
use crate::quad::{combine, integrate_interval, integrate_radial, neumaier_sum, AxisHint, QuadOptions, RadialHint};
use crate::weights::Weight;

/// `f(x) = g(|x|)`, with optional cutoffs (`g = 0` for `r < inner` or
/// `r > outer`) and the value taken at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialFunction {
    pub profile: Expr,
    #[serde(default)]
    pub inner: Option<f64>,
    #[serde(default)]
    pub outer: Option<f64>,
    #[serde(default)]
    pub origin: f64,
}

impl RadialFunction {
    pub fn new(profile: Expr) -> RadialFunction {
        RadialFunction { profile, inner: None, outer: None, origin: 0.0 }
    }

    /// `c |x|^a`, zero at the origin.
    pub fn power(c: f64, a: f64) -> RadialFunction {
        RadialFunction::new(Expr::product(vec![Expr::Const(c), Expr::Radius.powf(a)]))
    }

    pub fn zero() -> RadialFunction {
        RadialFunction::new(Expr::Const(0.0))
    }

    pub fn with_inner(mut self, r0: f64) -> RadialFunction {
        self.inner = Some(r0);
        self
    }

    pub fn with_outer(mut self, r1: f64) -> RadialFunction {
        self.outer = Some(r1);
        self
    }

    pub fn scaled(&self, c: f64) -> RadialFunction {
        let mut f = self.clone();
        f.profile = Expr::product(vec![Expr::Const(c), self.profile.clone()]);
        f.origin *= c;
        f
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(self.origin);
        }
        if self.inner.is_some_and(|r0| r < r0) || self.outer.is_some_and(|r1| r > r1) {
            return Ok(0.0);
        }
        Ok(self.profile.eval_r(r)?)
    }

    pub fn eval_point(&self, x: &[f64]) -> Result<f64> {
        self.eval(x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// `(c, a)` when the profile is `c r^a` on its support.
    pub fn power_form(&self) -> Option<(f64, f64)> {
        self.profile.radial_power()
    }

    pub fn is_zero(&self) -> bool {
        self.profile.is_zero()
    }

    fn support(&self) -> (f64, f64) {
        (self.inner.unwrap_or(0.0), self.outer.unwrap_or(f64::INFINITY))
    }

    fn cutoffs(&self) -> Vec<f64> {
        self.inner.into_iter().chain(self.outer).collect()
    }

    /// Hints for `|g|^p r^{kappa-1}` at both ends of the radial axis.
    fn hints(&self, p: f64, kappa: f64) -> (RadialHint, RadialHint) {
        let a0 = self.profile.asymptote(VarRef::R, Endpoint::Zero);
        let ai = self.profile.asymptote(VarRef::R, Endpoint::Infinity);
        let z = RadialHint { exponent: p * a0.exponent + kappa - 1.0, logs: (p * a0.log_power).abs() };
        let i = RadialHint { exponent: p * ai.exponent + kappa - 1.0, logs: (p * ai.log_power).abs() };
        (z, i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    ClosedForm,
    RadialQuadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormResult {
    /// `+inf` when the norm is infinite.
    pub value: f64,
    pub method: NormMethod,
    pub error: f64,
    pub divergent: bool,
    pub radii: Vec<f64>,
    pub brackets: Vec<f64>,
    /// The supremum over the grid sits at one of its ends.
    pub sup_at_boundary: bool,
    /// Other printed closed forms evaluated for comparison.
    pub variants: Vec<(String, f64)>,
}

impl NormResult {
    fn scalar(value: f64, method: NormMethod, error: f64) -> NormResult {
        NormResult {
            value,
            method,
            error,
            divergent: !value.is_finite(),
            radii: Vec::new(),
            brackets: Vec::new(),
            sup_at_boundary: false,
            variants: Vec::new(),
        }
    }

    fn infinite(method: NormMethod) -> NormResult {
        NormResult::scalar(f64::INFINITY, method, f64::INFINITY)
    }
}

#[derive(Debug, Clone)]
pub struct NormOptions {
    pub force_quadrature: bool,
    pub quad: QuadOptions,
    /// Radii `2^j`, `j in [-radii_j, radii_j]`.
    pub radii_j: i32,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions { force_quadrature: false, quad: QuadOptions::with_tol(1e-11), radii_j: 20 }
    }
}

/// `int_lo^hi c r^{e-1} dr`, `None` when infinite.
fn power_moment(c: f64, e: f64, lo: f64, hi: f64) -> Option<f64> {
    if c == 0.0 || hi <= lo {
        return Some(0.0);
    }
    if e == 0.0 {
        return (lo > 0.0 && hi.is_finite()).then(|| c * (hi / lo).ln());
    }
    if (lo == 0.0 && e < 0.0) || (hi.is_infinite() && e > 0.0) {
        return None;
    }
    Some(c * (hi.powf(e) - lo.powf(e)) / e)
}

fn kappa(w: &Weight) -> f64 {
    w.d as f64 + w.degree
}

/// `int_a^b |g(r)|^p r^{kappa-1} dr` by quadrature.
fn radial_moment(
    f: &RadialFunction,
    p: f64,
    kappa: f64,
    a: f64,
    b: f64,
    quad: &QuadOptions,
) -> crate::quad::QuadResult {
    let (lo, hi) = f.support();
    let (a, b) = (a.max(lo), b.min(hi));
    if b <= a {
        return combine(&[]);
    }
    let (z, i) = f.hints(p, kappa);
    let h = |r: f64| match f.profile.eval_r(r) {
        Ok(v) => v.abs().powf(p) * r.powf(kappa - 1.0),
        Err(_) => f64::NAN,
    };
    integrate_radial(h, a, b, z, i, &f.cutoffs(), quad)
}

/// `||f||_{L^p_w}`.
pub fn lp_norm(f: &RadialFunction, w: &Weight, p: f64, opts: &NormOptions) -> Result<NormResult> {
    if p < 1.0 {
        return input("lp_norm needs p >= 1");
    }
    let ws = w.sphere_integral()?;
    let k = kappa(w);
    if f.is_zero() {
        return Ok(NormResult::scalar(0.0, NormMethod::ClosedForm, 0.0));
    }
    let (lo, hi) = f.support();
    if let (Some((c, a)), false) = (f.power_form(), opts.force_quadrature) {
        return Ok(match power_moment(c.abs().powf(p), a * p + k, lo, hi) {
            Some(m) => NormResult::scalar((ws * m).powf(1.0 / p), NormMethod::ClosedForm, 0.0),
            None => NormResult::infinite(NormMethod::ClosedForm),
        });
    }
    let r = radial_moment(f, p, k, 0.0, f64::INFINITY, &opts.quad);
    if r.is_divergent() {
        return Ok(NormResult::infinite(NormMethod::RadialQuadrature));
    }
    let v = (ws * r.value).powf(1.0 / p);
    let err = v / p * r.rel_error;
    let mut out = NormResult::scalar(v, NormMethod::RadialQuadrature, err);
    out.divergent = !r.is_converged() && !v.is_finite();
    Ok(out)
}

fn radii(j: i32) -> Vec<f64> {
    (-j..=j).map(|e| 2f64.powi(e)).collect()
}

/// Values of `int_0^{R_j} |g|^p r^{kappa-1} dr` on the radius grid.
fn cumulative_moments(f: &RadialFunction, p: f64, k: f64, rs: &[f64], opts: &NormOptions) -> Option<Vec<f64>> {
    let (lo, hi) = f.support();
    if let (Some((c, a)), false) = (f.power_form(), opts.force_quadrature) {
        let c = c.abs().powf(p);
        return rs.iter().map(|&r| power_moment(c, a * p + k, lo, r.min(hi))).collect();
    }
    let mut edges = vec![0.0];
    edges.extend_from_slice(rs);
    let shells: Vec<crate::quad::QuadResult> =
        edges.par_windows(2).map(|w| radial_moment(f, p, k, w[0], w[1], &opts.quad)).collect();
    if shells.iter().any(|s| s.is_divergent()) {
        return None;
    }
    let mut acc = Vec::with_capacity(rs.len());
    for j in 0..rs.len() {
        acc.push(neumaier_sum(shells[..=j].iter().map(|s| s.value)));
    }
    Some(acc)
}

fn grid_sup(rs: Vec<f64>, brackets: Vec<f64>, method: NormMethod) -> NormResult {
    let n = brackets.len();
    let (mut best, mut idx) = (f64::NEG_INFINITY, 0);
    for (i, b) in brackets.iter().enumerate() {
        if *b > best {
            best = *b;
            idx = i;
        }
    }
    let growing = |a: f64, b: f64| b > a * (1.0 + 1e-9) + 1e-300;
    let left = n >= 3 && growing(brackets[1], brackets[0]) && growing(brackets[2], brackets[1]);
    let right = n >= 3 && growing(brackets[n - 2], brackets[n - 1]) && growing(brackets[n - 3], brackets[n - 2]);
    let at_end = idx == 0 || idx + 1 == n;
    NormResult {
        value: if left || right { f64::INFINITY } else { best },
        method,
        error: 0.0,
        divergent: left || right,
        radii: rs,
        brackets,
        sup_at_boundary: at_end && (left || right),
        variants: Vec::new(),
    }
}

/// `sup_R (w(B_R)^{-(1+lambda p)} int_{B_R} |f|^p w)^{1/p}` over `R = 2^j`.
pub fn central_morrey_norm(
    f: &RadialFunction,
    w: &Weight,
    p: f64,
    lambda: f64,
    opts: &NormOptions,
) -> Result<NormResult> {
    if !(lambda >= -1.0 / p && lambda < 0.0) {
        return input(format!("central Morrey norm needs -1/p <= lambda < 0, got {lambda}"));
    }
    let ws = w.sphere_integral()?;
    let k = kappa(w);
    if k <= 0.0 {
        return Err(Error::Divergent("weight is not locally integrable".into()));
    }
    let rs = radii(opts.radii_j);
    let method = if f.power_form().is_some() && !opts.force_quadrature {
        NormMethod::ClosedForm
    } else {
        NormMethod::RadialQuadrature
    };
    let Some(cum) = cumulative_moments(f, p, k, &rs, opts) else {
        let mut r = NormResult::infinite(method);
        r.radii = rs;
        return Ok(r);
    };
    let brackets: Vec<f64> = rs
        .iter()
        .zip(&cum)
        .map(|(&r, &c)| {
            let ball = ws * r.powf(k) / k;
            (ball.powf(-(1.0 + lambda * p)) * ws * c).powf(1.0 / p)
        })
        .collect();
    let mut out = grid_sup(rs, brackets, method);
    if let Some((c, a)) = f.power_form() {
        if f.inner.is_none() && f.outer.is_none() && (a - k * lambda).abs() <= 1e-14 * a.abs().max(1.0) {
            let c = c.abs();
            out.variants.push((
                "derived: ((d+alpha)/w(S))^lambda (1+lambda p)^(-1/p)".into(),
                c * (k / ws).powf(lambda) * (1.0 + lambda * p).powf(-1.0 / p),
            ));
            out.variants.push((
                "printed: w(S)^(-lambda) ((d+alpha)(1+lambda p))^(-1/p)".into(),
                c * ws.powf(-lambda) * (k * (1.0 + lambda * p)).powf(-1.0 / p),
            ));
        }
    }
    Ok(out)
}

/// Exact central Morrey norm of `|x|^{(d+alpha) lambda}`.
pub fn morrey_power_norm(w: &Weight, p: f64, lambda: f64) -> Result<f64> {
    let k = kappa(w);
    let ws = w.sphere_integral()?;
    if 1.0 + lambda * p <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((k / ws).powf(lambda) * (1.0 + lambda * p).powf(-1.0 / p))
}

/// `sup_R (w(B_R)^{-(1+lambda q)} int_{B_R} |b - b_{B_R,w}|^q w)^{1/q}`.
pub fn cmo_norm(b: &RadialFunction, w: &Weight, q: f64, lambda: f64, opts: &NormOptions) -> Result<NormResult> {
    if q <= 1.0 {
        return input("cmo_norm needs q > 1");
    }
    let ws = w.sphere_integral()?;
    let k = kappa(w);
    if k <= 0.0 {
        return Err(Error::Divergent("weight is not locally integrable".into()));
    }
    let rs = radii(opts.radii_j);
    if matches!(b.profile, Expr::Const(_)) && b.inner.is_none() && b.outer.is_none() {
        let n = rs.len();
        let mut r = grid_sup(rs, vec![0.0; n], NormMethod::ClosedForm);
        r.value = 0.0;
        return Ok(r);
    }
    // int_0^R F(r) r^{k-1} dr = R^k int_0^1 F(R s) s^{k-1} ds
    let scaled = |r_big: f64, power: f64, shift: f64| {
        let (z, i) = b.hints(power, k);
        let breaks: Vec<f64> = b.cutoffs().iter().map(|c| c / r_big).filter(|s| *s < 1.0).collect();
        let h = |s: f64| match b.eval(r_big * s) {
            Ok(v) => (v - shift).abs().powf(power) * s.powf(k - 1.0),
            Err(_) => f64::NAN,
        };
        integrate_radial(h, 0.0, 1.0, z, i, &breaks, &opts.quad)
    };
    let rows: Vec<Option<f64>> = rs
        .par_iter()
        .map(|&r| {
            // weighted mean: (k / R^k) int_0^R g r^{k-1} dr, signed
            let (z, i) = b.hints(1.0, k);
            let breaks: Vec<f64> = b.cutoffs().iter().map(|c| c / r).filter(|s| *s < 1.0).collect();
            let hm = |s: f64| match b.eval(r * s) {
                Ok(v) => v * s.powf(k - 1.0),
                Err(_) => f64::NAN,
            };
            let m = integrate_radial(hm, 0.0, 1.0, z, i, &breaks, &opts.quad);
            if m.is_divergent() {
                return None;
            }
            let mean = k * m.value;
            let o = scaled(r, q, mean);
            if o.is_divergent() {
                return None;
            }
            // w(B)^{-(1+lambda q)} * w(S) R^k * int_0^1 ...
            let ball = ws * r.powf(k) / k;
            Some((ball.powf(-(1.0 + lambda * q)) * ws * r.powf(k) * o.value).powf(1.0 / q))
        })
        .collect();
    if rows.iter().any(Option::is_none) {
        let mut r = NormResult::infinite(NormMethod::RadialQuadrature);
        r.radii = rs;
        return Ok(r);
    }
    let brackets = rows.into_iter().map(Option::unwrap).collect();
    Ok(grid_sup(rs, brackets, NormMethod::RadialQuadrature))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogBmoRow {
    pub center: f64,
    /// Constant subtracted from `log|x|`: `log|x_0|` or `0`.
    pub c: f64,
    pub oscillation: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogBmoReport {
    pub pass: bool,
    pub worst_margin: f64,
    pub rows: Vec<LogBmoRow>,
}

/// `w(B(x0, r))` for a one-dimensional power weight.
fn interval_weight(w: &Weight, x0: f64, r: f64) -> Result<f64> {
    let a = w.degree;
    let c = w.eval(&[1.0])?;
    let anti = |x: f64| x.signum() * x.abs().powf(a + 1.0) / (a + 1.0);
    Ok(c * (anti(x0 + r) - anti(x0 - r)))
}

/// Mean oscillation of `log|x|` on unit balls, against the two bounds of the
/// classical argument that `log|x|` has bounded mean oscillation for doubling
/// power weights. One-dimensional weights only.
pub fn log_bmo_check(w: &Weight, centers: &[f64]) -> Result<LogBmoReport> {
    log_bmo_check_with(w, centers, &Expr::Radius.ln())
}

/// As [`log_bmo_check`] for an arbitrary radial symbol `b(|x|)`.
pub fn log_bmo_check_with(w: &Weight, centers: &[f64], symbol: &Expr) -> Result<LogBmoReport> {
    if w.d != 1 {
        return input("log_bmo_check supports d = 1 only");
    }
    if !w.locally_integrable() {
        return Err(Error::Divergent("weight is not doubling".into()));
    }
    let a = w.degree;
    let opts = QuadOptions::with_tol(1e-10);
    let mut rows = Vec::with_capacity(centers.len());
    for &x0 in centers {
        let (c, bound) = if x0.abs() >= 2.0 {
            (x0.abs().ln(), 2f64.ln())
        } else {
            (0.0, 3f64.ln() * interval_weight(w, x0, 6.0)? / interval_weight(w, x0, 1.0)?)
        };
        let (lo, hi) = (x0 - 1.0, x0 + 1.0);
        let mut cuts = vec![lo, hi];
        for z in [0.0, c.exp(), -c.exp()] {
            if z > lo && z < hi {
                cuts.push(z);
            }
        }
        cuts.sort_by(f64::total_cmp);
        let f = |x: f64| {
            let v = symbol.eval_r(x.abs()).unwrap_or(f64::NAN);
            (v - c).abs() * w.eval(&[x]).unwrap_or(f64::NAN)
        };
        let mut parts = Vec::new();
        for seg in cuts.windows(2) {
            let hint = AxisHint {
                zero: if seg[0] == 0.0 { a } else { 0.0 },
                one: if seg[1] == 0.0 { a } else { 0.0 },
                log_zero: if seg[0] == 0.0 { 1.0 } else { 0.0 },
                log_one: if seg[1] == 0.0 { 1.0 } else { 0.0 },
            };
            parts.push(integrate_interval(f, seg[0], seg[1], hint, &opts));
        }
        let total = combine(&parts);
        let osc = total.value / interval_weight(w, x0, 1.0)?;
        rows.push(LogBmoRow { center: x0, c, oscillation: osc, bound, margin: bound - osc });
    }
    let worst = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    Ok(LogBmoReport { pass: worst >= 0.0, worst_margin: worst, rows })
}

/// One slot of the Lebesgue extremal family with its exact norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub f: RadialFunction,
    pub eps_k: f64,
    pub exponent: f64,
    pub norm: f64,
}

/// `f_k = |x|^{-(d+a_k)/p_k - eps_k}` on `|x| >= 1`, `eps_k = p eps / p_k`,
/// with norms `(w_k(S_d)/(p eps))^{1/p_k}`.
pub fn make_witness_lp(s: &Scenario, eps: f64) -> Result<Vec<Witness>> {
    if eps <= 0.0 {
        return input("witness parameter must be positive");
    }
    let df = s.d as f64;
    let p = s.derived.p;
    let mut out = Vec::with_capacity(s.m());
    for (w, pk) in s.weights.iter().zip(&s.p) {
        let eps_k = p * eps / pk;
        let exponent = -(df + w.degree) / pk - eps_k;
        let norm = (w.sphere_integral()? / (p * eps)).powf(1.0 / pk);
        out.push(Witness { f: RadialFunction::power(1.0, exponent).with_inner(1.0), eps_k, exponent, norm });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn quad_opts() -> NormOptions {
        NormOptions { force_quadrature: true, ..Default::default() }
    }

    #[test]
    fn witness_norm() {
        let w = Weight::unweighted(1);
        let f = RadialFunction::power(1.0, -0.5 - 0.01).with_inner(1.0);
        let n = lp_norm(&f, &w, 2.0, &NormOptions::default()).unwrap();
        assert!(rel(n.value, 10.0) < 1e-14);
        let q = lp_norm(&f, &w, 2.0, &quad_opts()).unwrap();
        assert!(rel(q.value, 10.0) < 1e-9, "{q:?}");
    }

    #[test]
    fn indicator_and_gaussian() {
        let f = RadialFunction::new(Expr::Const(1.0)).with_outer(1.0);
        let n = lp_norm(&f, &Weight::unweighted(1), 2.0, &NormOptions::default()).unwrap();
        assert!(rel(n.value, 2f64.sqrt()) < 1e-15);
        let g = RadialFunction::new(parse("exp(-r^2/2)", 0).unwrap());
        let n = lp_norm(&g, &Weight::unweighted(2), 2.0, &NormOptions::default()).unwrap();
        assert_eq!(n.method, NormMethod::RadialQuadrature);
        assert!(rel(n.value, PI.sqrt()) < 1e-10, "{n:?}");
    }

    #[test]
    fn divergent_lp() {
        let f = RadialFunction::power(1.0, -0.5);
        let n = lp_norm(&f, &Weight::unweighted(1), 2.0, &NormOptions::default()).unwrap();
        assert!(n.divergent);
    }

    #[test]
    fn morrey_power_profile_is_flat() {
        for (d, alpha, p, lambda) in [(1usize, 0.0, 2.0, -0.25), (2, 1.0, 3.0, -0.2), (3, -0.5, 1.5, -0.5)] {
            let w = Weight::power(d, alpha);
            let k = d as f64 + alpha;
            let f = RadialFunction::power(1.0, k * lambda);
            let n = central_morrey_norm(&f, &w, p, lambda, &NormOptions::default()).unwrap();
            let want = morrey_power_norm(&w, p, lambda).unwrap();
            for b in &n.brackets {
                assert!(rel(*b, want) < 1e-12);
            }
            assert!(!n.sup_at_boundary && !n.divergent);
            let q = central_morrey_norm(&f, &w, p, lambda, &quad_opts()).unwrap();
            assert!(rel(q.value, want) < 1e-8, "{q:?} vs {want}");
        }
    }

    #[test]
    fn morrey_indicator() {
        let f = RadialFunction::new(Expr::Const(1.0)).with_outer(1.0);
        let n = central_morrey_norm(&f, &Weight::unweighted(1), 2.0, -0.5, &NormOptions::default()).unwrap();
        assert!(rel(n.value, 2f64.sqrt()) < 1e-14);
        assert!(!n.divergent);
        let z =
            central_morrey_norm(&RadialFunction::zero(), &Weight::unweighted(1), 2.0, -0.5, &NormOptions::default())
                .unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn morrey_unbounded_profile_flagged() {
        let f = RadialFunction::power(1.0, 0.0);
        let n = central_morrey_norm(&f, &Weight::unweighted(1), 2.0, -0.25, &NormOptions::default()).unwrap();
        assert!(n.divergent && n.sup_at_boundary);
    }

    #[test]
    fn cmo_of_log() {
        let b = RadialFunction::new(Expr::Radius.ln());
        let n = cmo_norm(&b, &Weight::unweighted(1), 2.0, 0.0, &NormOptions::default()).unwrap();
        for v in &n.brackets {
            assert!((v - 1.0).abs() < 1e-8, "{v}");
        }
        // power weight: standard deviation of log r under r^{k-1} dr is 1/k
        let n = cmo_norm(&b, &Weight::power(2, 1.0), 2.0, 0.0, &NormOptions::default()).unwrap();
        for v in &n.brackets {
            assert!((v - 1.0 / 3.0).abs() < 1e-8, "{v}");
        }
        let c =
            cmo_norm(&RadialFunction::new(Expr::Const(3.0)), &Weight::unweighted(1), 2.0, 0.0, &NormOptions::default())
                .unwrap();
        assert_eq!(c.value, 0.0);
    }

    #[test]
    fn log_bmo_examples() {
        let w = Weight::unweighted(1);
        let r = log_bmo_check(&w, &[5.0, 0.0]).unwrap();
        assert!(r.pass);
        assert!(r.rows[0].oscillation <= 2f64.ln());
        assert!((r.rows[1].bound - 3f64.ln() * 6.0).abs() < 1e-12);
        // int_0^1 log(1/x) dx = 1
        assert!((r.rows[1].oscillation - 1.0).abs() < 1e-9);
        // a symbol far from log|x| breaks the far-field bound
        let c = log_bmo_check_with(&w, &[3.0], &Expr::Const(0.0)).unwrap();
        assert!(!c.pass);
        let r = log_bmo_check(&Weight::power(1, 1.0), &[0.0, 0.5, 3.0, -7.0]).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn witnesses() {
        let s = Scenario::lebesgue("h", 1, crate::kernels::KernelSpec::coordinate(1), vec![2.0]).unwrap();
        let w = make_witness_lp(&s, 0.01).unwrap();
        assert!(rel(w[0].norm, 10.0) < 1e-14);
        assert!((w[0].exponent + 0.51).abs() < 1e-15);
        let s = Scenario::lebesgue("m", 1, crate::kernels::KernelSpec::coordinate(2), vec![4.0, 4.0]).unwrap();
        let w = make_witness_lp(&s, 0.01).unwrap();
        assert!((w[0].eps_k - 0.005).abs() < 1e-16);
    }
}
