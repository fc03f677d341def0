//! Pointwise evaluation of the multilinear Hardy-Cesaro and Hausdorff
//! operators and their commutators, with exact paths for power inputs.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::constants::{face_hints, kernel_integral, Method};
use crate::error::{input, Result};
use crate::expr::Expr;
use crate::kernels::{Domain, KernelSpec, Scenario};
use crate::quad::{
    combine, integrate_interval, integrate_positive_orthant, integrate_unit_cube, AxisHint, QuadOptions, QuadResult,
};
use crate::spaces::RadialFunction;
use crate::weights::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorMode {
    Plain,
    Hausdorff,
    Commutator,
}

type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// An input slot: a radial profile or an arbitrary point function.
#[derive(Clone)]
pub enum InputFunction {
    Radial(RadialFunction),
    Point(PointFn),
}

impl fmt::Debug for InputFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputFunction::Radial(r) => f.debug_tuple("Radial").field(r).finish(),
            InputFunction::Point(_) => f.write_str("Point(..)"),
        }
    }
}

impl InputFunction {
    pub fn point(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> InputFunction {
        InputFunction::Point(Arc::new(f))
    }

    fn radial(&self) -> Option<&RadialFunction> {
        match self {
            InputFunction::Radial(r) => Some(r),
            InputFunction::Point(_) => None,
        }
    }

    /// `f(s x)` for a scalar dilation `s`.
    fn at_dilation(&self, s: f64, x: &[f64], xnorm: f64) -> f64 {
        match self {
            InputFunction::Radial(g) => g.eval(s.abs() * xnorm).unwrap_or(f64::NAN),
            InputFunction::Point(h) => {
                let y: Vec<f64> = x.iter().map(|v| s * v).collect();
                h(&y)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct OperatorInstance {
    pub d: usize,
    pub kernel: KernelSpec,
    pub inputs: Vec<InputFunction>,
    pub symbols: Option<Vec<RadialFunction>>,
    pub mode: OperatorMode,
}

impl OperatorInstance {
    /// Plain operator, or the Hausdorff operator for orthant kernels.
    pub fn new(s: &Scenario, inputs: Vec<InputFunction>) -> Result<OperatorInstance> {
        let mode = match s.kernel.domain {
            Domain::UnitCube => OperatorMode::Plain,
            Domain::PositiveOrthant => OperatorMode::Hausdorff,
        };
        OperatorInstance { d: s.d, kernel: s.kernel.clone(), inputs, symbols: None, mode }.checked()
    }

    pub fn commutator(
        s: &Scenario,
        inputs: Vec<InputFunction>,
        symbols: Vec<RadialFunction>,
    ) -> Result<OperatorInstance> {
        OperatorInstance {
            d: s.d,
            kernel: s.kernel.clone(),
            inputs,
            symbols: Some(symbols),
            mode: OperatorMode::Commutator,
        }
        .checked()
    }

    /// Instance with radial inputs.
    pub fn radial(s: &Scenario, inputs: Vec<RadialFunction>) -> Result<OperatorInstance> {
        OperatorInstance::new(s, inputs.into_iter().map(InputFunction::Radial).collect())
    }

    fn checked(self) -> Result<OperatorInstance> {
        let m = self.kernel.m;
        if self.inputs.len() != m {
            return input(format!("operator needs {m} inputs, got {}", self.inputs.len()));
        }
        if self.symbols.as_ref().is_some_and(|b| b.len() != m) {
            return input(format!("commutator needs {m} symbols"));
        }
        if self.mode == OperatorMode::Hausdorff && self.kernel.domain != Domain::PositiveOrthant {
            return input("Hausdorff mode needs an orthant kernel");
        }
        Ok(self)
    }

    /// Symbolic integrand used only to place face hints; cutoff inputs and
    /// point inputs contribute nothing.
    fn hint_factor(&self, xnorm: f64) -> Expr {
        let mut factors = Vec::new();
        for (k, f) in self.inputs.iter().enumerate() {
            let dil = Expr::product(vec![Expr::Const(xnorm), self.kernel.s[k].clone().abs()]);
            if let Some(g) = f.radial().filter(|g| g.inner.is_none() && g.outer.is_none()) {
                factors.push(g.profile.substitute_radius(&dil));
            }
            if let Some(b) = self.symbols.as_ref().map(|b| &b[k]) {
                let bx = b.eval(xnorm).unwrap_or(0.0);
                let bs = b.profile.substitute_radius(&dil);
                factors.push(Expr::sum(vec![Expr::Const(bx), Expr::product(vec![Expr::Const(-1.0), bs])]));
            }
        }
        Expr::product(factors)
    }

    /// Axis breakpoints where a cutoff `|s_k(t) x| = r_0` crosses a
    /// single-variable monomial dilation.
    fn cutoff_breakpoints(&self, xnorm: f64) -> Vec<Vec<f64>> {
        let n = self.kernel.n;
        let mut out = vec![Vec::new(); n];
        for (k, f) in self.inputs.iter().enumerate() {
            let Some(g) = f.radial() else { continue };
            let Some(e) = self.kernel.s[k].classify(n).exponents().map(<[f64]>::to_vec) else { continue };
            let coeff = match self.kernel.s[k].classify(n) {
                crate::expr::ClosedFormClass::Monomial { coeff, .. } => coeff.abs(),
                _ => continue,
            };
            let live: Vec<usize> = (0..n).filter(|&i| e[i] != 0.0).collect();
            if live.len() != 1 || coeff == 0.0 {
                continue;
            }
            let i = live[0];
            for r0 in g.inner.into_iter().chain(g.outer) {
                let t = (r0 / (coeff * xnorm)).powf(1.0 / e[i]);
                let ok = match self.kernel.domain {
                    Domain::UnitCube => t > 0.0 && t < 1.0,
                    Domain::PositiveOrthant => t > 0.0 && t.is_finite(),
                };
                if ok {
                    out[i].push(t);
                }
            }
        }
        out
    }
}

/// A monomial-kernel instance split into independent factors.
struct Factored {
    constant: f64,
    parts: Vec<OperatorInstance>,
}

impl OperatorInstance {
    /// With a monomial `psi` on the cube the integral factors over groups of
    /// variables linked through the dilations; variables absent from every
    /// dilation integrate out as `int_0^1 t^a dt = 1/(a+1)`. `None` when
    /// nothing splits, `Some(Err)` when a free factor diverges.
    fn factored(&self) -> Option<std::result::Result<Factored, ()>> {
        let k = &self.kernel;
        if k.domain != Domain::UnitCube {
            return None;
        }
        let crate::expr::ClosedFormClass::Monomial { coeff, exponents } = k.psi.classify(k.n) else { return None };
        let vars: Vec<Vec<usize>> = k.s.iter().map(|s| (0..k.n).filter(|&i| s.uses_var(i)).collect()).collect();
        if vars.iter().any(Vec::is_empty) {
            return None;
        }
        // union-find over variables, joined through each dilation
        let mut root: Vec<usize> = (0..k.n).collect();
        fn find(root: &mut [usize], i: usize) -> usize {
            let mut i = i;
            while root[i] != i {
                root[i] = root[root[i]];
                i = root[i];
            }
            i
        }
        for vs in &vars {
            for w in vs.windows(2) {
                let (a, b) = (find(&mut root, w[0]), find(&mut root, w[1]));
                root[a.max(b)] = a.min(b);
            }
        }
        let used: Vec<bool> = (0..k.n).map(|i| vars.iter().any(|vs| vs.contains(&i))).collect();
        let mut groups: Vec<usize> = (0..k.n).filter(|&i| used[i]).map(|i| find(&mut root, i)).collect();
        groups.sort_unstable();
        groups.dedup();
        if groups.len() == 1 && used.iter().all(|u| *u) {
            return None;
        }
        let mut constant = coeff;
        for i in (0..k.n).filter(|&i| !used[i]) {
            if exponents[i] <= -1.0 {
                return Some(Err(()));
            }
            constant /= exponents[i] + 1.0;
        }
        let mut parts = Vec::with_capacity(groups.len());
        for g in groups {
            let gv: Vec<usize> = (0..k.n).filter(|&i| used[i] && find(&mut root, i) == g).collect();
            let slots: Vec<usize> = (0..k.m).filter(|&j| find(&mut root, vars[j][0]) == g).collect();
            let mut map = vec![0; k.n];
            for (j, &i) in gv.iter().enumerate() {
                map[i] = j;
            }
            let psi = Expr::product(gv.iter().enumerate().map(|(j, &i)| Expr::Var(j).powf(exponents[i])).collect());
            let kernel = KernelSpec {
                m: slots.len(),
                n: gv.len(),
                psi,
                s: slots.iter().map(|&j| k.s[j].remap_vars(&map)).collect(),
                domain: k.domain,
                face_exponents: None,
                beta: k.beta,
            };
            parts.push(OperatorInstance {
                d: self.d,
                kernel,
                inputs: slots.iter().map(|&j| self.inputs[j].clone()).collect(),
                symbols: self.symbols.as_ref().map(|b| slots.iter().map(|&j| b[j].clone()).collect()),
                mode: self.mode,
            });
        }
        Some(Ok(Factored { constant, parts }))
    }
}

/// `c * prod v_i` with relative errors adding.
fn product_of(c: f64, parts: &[QuadResult]) -> QuadResult {
    if parts.iter().any(QuadResult::is_divergent) {
        return QuadResult::divergent(parts[0].method);
    }
    let value = c * parts.iter().map(|r| r.value).product::<f64>();
    let rel: f64 = parts.iter().map(|r| if r.value != 0.0 { r.abs_error / r.value.abs() } else { 0.0 }).sum();
    let mut out = combine(parts);
    out.value = value;
    out.abs_error = value.abs() * rel;
    out.rel_error = rel;
    out
}

/// `T(f_1..f_m)(x)` by quadrature over the kernel's domain.
pub fn apply(inst: &OperatorInstance, x: &[f64], opts: &QuadOptions) -> Result<QuadResult> {
    if x.len() != inst.d {
        return input(format!("point has {} coordinates, expected {}", x.len(), inst.d));
    }
    match inst.factored() {
        Some(Ok(f)) => {
            let parts = f.parts.iter().map(|p| apply(p, x, opts)).collect::<Result<Vec<_>>>()?;
            return Ok(product_of(f.constant, &parts));
        }
        Some(Err(())) => return Ok(QuadResult::divergent(crate::quad::QuadMethod::SymbolicDivergence)),
        None => {}
    }
    let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let k = &inst.kernel;
    let n = k.n;
    let rest = inst.hint_factor(xnorm);
    let class = Expr::product(vec![k.psi.clone(), rest.clone()]).classify(n);
    let mut hints = face_hints(k, &rest, &class);
    if inst.inputs.iter().any(|f| f.radial().is_none_or(|g| g.inner.is_some() || g.outer.is_some())) {
        hints.exact = false;
    }
    let mut o = opts.clone();
    o.breakpoints = inst.cutoff_breakpoints(xnorm);
    let f = |t: &[f64]| -> f64 {
        let Ok(mut v) = k.psi.eval_t(t) else { return f64::NAN };
        if v == 0.0 {
            return 0.0;
        }
        for (j, fj) in inst.inputs.iter().enumerate() {
            let Ok(s) = k.s[j].eval_t(t) else { return f64::NAN };
            let fv = fj.at_dilation(s, x, xnorm);
            if fv == 0.0 {
                return 0.0;
            }
            v *= fv;
            if let Some(b) = inst.symbols.as_ref().map(|b| &b[j]) {
                let (Ok(bx), Ok(bs)) = (b.eval(xnorm), b.eval(s.abs() * xnorm)) else { return f64::NAN };
                v *= bx - bs;
            }
        }
        v
    };
    Ok(match k.domain {
        Domain::UnitCube => integrate_unit_cube(f, n, &hints, &o),
        Domain::PositiveOrthant => integrate_positive_orthant(f, n, &hints, &o),
    })
}

/// `T(f)(x) = coefficient * |x|^exponent` for power inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialClosedForm {
    /// `None` when the kernel integral diverges.
    pub coefficient: Option<f64>,
    pub exponent: f64,
    pub method: Method,
    pub integrand: String,
    pub quadrature: Option<QuadResult>,
}

fn is_log_symbol(b: &RadialFunction) -> bool {
    b.inner.is_none() && b.outer.is_none() && b.profile == Expr::Radius.ln()
}

/// Exact reduction for inputs `c_k |x|^{g_k}` and, in commutator mode,
/// symbols `log|x|`: the dilation factor becomes `prod |s_k|^{g_k}` times
/// `prod log(1/|s_k|)`.
pub fn apply_radial_closed_form(
    inst: &OperatorInstance,
    force_quadrature: bool,
    quad: &QuadOptions,
) -> Result<RadialClosedForm> {
    let mut coeff = 1.0;
    let mut gammas = Vec::with_capacity(inst.inputs.len());
    for f in &inst.inputs {
        let Some(g) = f.radial().filter(|g| g.inner.is_none() && g.outer.is_none()) else {
            return input("closed form needs uncut radial power inputs");
        };
        let Some((c, a)) = g.power_form() else {
            return input(format!("input profile {} is not a power", g.profile));
        };
        coeff *= c;
        gammas.push(a);
    }
    let commutator = inst.symbols.is_some();
    if inst.symbols.as_ref().is_some_and(|b| !b.iter().all(is_log_symbol)) {
        return input("closed form needs log|x| symbols");
    }
    let exponent = gammas.iter().sum();
    let factors = inst
        .kernel
        .s
        .iter()
        .zip(&gammas)
        .map(|(s, g)| {
            let base = s.clone().abs();
            let mut f = vec![base.clone().powf(*g)];
            if commutator {
                f.push(Expr::Const(-1.0));
                f.push(base.ln());
            }
            Expr::product(f)
        })
        .collect();
    let rest = Expr::product(factors);
    if coeff == 0.0 || inst.kernel.psi.is_zero() {
        return Ok(RadialClosedForm {
            coefficient: Some(0.0),
            exponent,
            method: Method::ClosedForm,
            integrand: "0".into(),
            quadrature: None,
        });
    }
    let (v, method, quadrature, integrand) = kernel_integral(&inst.kernel, &rest, force_quadrature, quad);
    Ok(RadialClosedForm { coefficient: v.map(|v| v * coeff), exponent, method, integrand, quadrature })
}

#[derive(Debug, Clone)]
pub struct OutputOptions {
    pub inner: QuadOptions,
    pub outer: QuadOptions,
    /// Outer quadrature runs over `r <= 2^r_max_log2`.
    pub r_max_log2: f64,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions { inner: QuadOptions::with_tol(1e-12), outer: QuadOptions::with_tol(1e-10), r_max_log2: 40.0 }
    }
}

/// `||T(f)||_{L^p_w}` for cutoff power inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputNorm {
    pub value: f64,
    pub divergent: bool,
    /// `int H(e^u)^p e^{e u} du` over the truncated range.
    pub finite_part: f64,
    pub finite_error: f64,
    /// Analytic tail beyond the truncation and its half-width.
    pub tail: f64,
    pub tail_error: f64,
    pub r_max: f64,
    /// `sum g_k`, the power carried by the output.
    pub exponent: f64,
    /// `H(inf)`, the limit of `T(f)(x) |x|^{-exponent}`.
    pub limit: Option<f64>,
}

/// Largest `|s_k|` over sample points of a cube kernel.
fn dilation_sup(k: &KernelSpec) -> f64 {
    let mut pts = k.sample_points(4096);
    pts.push(vec![1.0; k.n]);
    pts.iter()
        .flat_map(|t| k.s.iter().map(move |s| s.eval_t(t).map(f64::abs).unwrap_or(f64::INFINITY)))
        .fold(0.0, f64::max)
}

/// Norm of the radial output `T(f)(r) = r^{e_g} H(r)` for inputs
/// `c_k |x|^{g_k}` cut off inside `r_k`: the range `[r_start, 2^40]` runs
/// through `u = log r`; beyond it `H` is squeezed between `H(2^40)` and
/// `H(inf)`, which gives the tail up to the reported half-width.
pub fn output_lp_norm(inst: &OperatorInstance, p: f64, w: &Weight, opts: &OutputOptions) -> Result<OutputNorm> {
    if inst.mode == OperatorMode::Commutator {
        return input("output norms are for plain and Hausdorff operators");
    }
    if inst.kernel.domain != Domain::UnitCube {
        return input("output norms need a cube kernel");
    }
    let mut gammas = Vec::new();
    let mut cuts = Vec::new();
    let mut zero = inst.kernel.psi.is_zero();
    for f in &inst.inputs {
        let Some(g) = f.radial() else { return input("output norms need radial inputs") };
        if g.outer.is_some() {
            return input("output norms need inputs without outer cutoffs");
        }
        let Some((c, a)) = g.power_form() else {
            return input(format!("input profile {} is not a power", g.profile));
        };
        zero |= c == 0.0;
        gammas.push(a);
        cuts.extend(g.inner);
    }
    let g_sum: f64 = gammas.iter().sum();
    let kappa = w.d as f64 + w.degree;
    let e = p * g_sum + kappa;
    let r_max = 2f64.powf(opts.r_max_log2);
    let blank = |value: f64, limit| OutputNorm {
        value,
        divergent: !value.is_finite(),
        finite_part: value,
        finite_error: 0.0,
        tail: 0.0,
        tail_error: 0.0,
        r_max,
        exponent: g_sum,
        limit,
    };
    if zero {
        return Ok(blank(0.0, Some(0.0)));
    }
    if cuts.iter().all(|&r| r <= 0.0) || e >= 0.0 {
        return Ok(blank(f64::INFINITY, None));
    }
    let uncut = OperatorInstance {
        inputs: inst
            .inputs
            .iter()
            .map(|f| {
                let mut g = f.radial().unwrap().clone();
                g.inner = None;
                InputFunction::Radial(g)
            })
            .collect(),
        ..inst.clone()
    };
    let limit = apply_radial_closed_form(&uncut, false, &opts.inner)?.coefficient;
    let Some(h_inf) = limit else { return Ok(blank(f64::INFINITY, None)) };
    let sup = dilation_sup(&inst.kernel);
    if !sup.is_finite() || sup == 0.0 {
        return input("output norms need bounded dilations");
    }
    let r0 = cuts.iter().copied().filter(|&r| r > 0.0).fold(f64::INFINITY, f64::min);
    let onset = (r0 / sup).ln();
    let u0 = onset - 0.5;
    let u1 = r_max.ln();
    // the constant is finite, so the inner integrals converge
    let mut inner = opts.inner.clone();
    inner.probe_divergence = false;
    let h = |r: f64| -> f64 {
        let mut x = vec![0.0; inst.d];
        x[0] = r;
        apply(inst, &x, &inner).map(|q| q.value).unwrap_or(f64::NAN) * r.powf(-g_sum)
    };
    let hs = |u: f64| h(u.exp()).abs().powf(p) * (e * u).exp();
    let mut outer = opts.outer.clone();
    outer.breakpoints = vec![cuts.iter().map(|r| (r / sup).ln()).filter(|u| *u > u0 && *u < u1).collect()];
    outer.probe_divergence = false;
    let fin = integrate_interval(hs, u0, u1, AxisHint::default(), &outer);
    let h_end = h(r_max).abs();
    let h_half = h(0.5 * r_max).abs();
    let scale = r_max.powf(e) / -e;
    let lo_tail = h_end.powf(p) * scale;
    let hi_tail = h_inf.abs().powf(p).max(h_end.powf(p)) * scale;
    // the deficit H(inf) - H(r) decays like r^{-delta}; correct to first order
    let (d1, d2) = (h_inf.abs() - h_half, h_inf.abs() - h_end);
    let (tail, tail_error) = if d2 > 0.0 && d1 > d2 && h_inf != 0.0 {
        let delta = (d1 / d2).log2();
        let hi = h_inf.abs();
        let first = p * hi.powf(p - 1.0) * d2 * r_max.powf(e) / (delta - e);
        let second = 0.5 * p * (p - 1.0).abs() * hi.powf(p - 2.0) * d2 * d2 * r_max.powf(e) / (2.0 * delta - e);
        ((hi_tail - first).clamp(lo_tail, hi_tail), second + 1e-3 * first.abs())
    } else {
        (0.5 * (lo_tail + hi_tail), 0.5 * (hi_tail - lo_tail))
    };
    let total = fin.value + tail;
    let ws = w.sphere_integral()?;
    Ok(OutputNorm {
        value: (ws * total).powf(1.0 / p),
        divergent: fin.is_divergent(),
        finite_part: fin.value,
        finite_error: fin.abs_error,
        tail,
        tail_error,
        r_max,
        exponent: g_sum,
        limit: Some(h_inf),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn opts() -> QuadOptions {
        QuadOptions::with_tol(1e-11)
    }

    fn hardy(d: usize) -> Scenario {
        Scenario::lebesgue("h", d, KernelSpec::coordinate(1), vec![2.0]).unwrap()
    }

    #[test]
    fn constants_and_identity() {
        let s = hardy(2);
        let one = OperatorInstance::radial(&s, vec![RadialFunction::new(Expr::Const(1.0))]).unwrap();
        for x in [[0.3, -1.0], [5.0, 2.0]] {
            let v = apply(&one, &x, &opts()).unwrap();
            assert!((v.value - 1.0).abs() < 1e-12);
        }
        let s = hardy(1);
        let id = OperatorInstance::new(&s, vec![InputFunction::point(|y| y[0])]).unwrap();
        let v = apply(&id, &[3.0], &opts()).unwrap();
        assert!(rel(v.value, 1.5) < 1e-12);
    }

    #[test]
    fn closed_forms() {
        let s = hardy(1);
        let inst = OperatorInstance::radial(&s, vec![RadialFunction::power(1.0, -0.25)]).unwrap();
        let c = apply_radial_closed_form(&inst, false, &opts()).unwrap();
        assert!(rel(c.coefficient.unwrap(), 4.0 / 3.0) < 1e-15);
        assert_eq!(c.exponent, -0.25);
        let x = 2.5f64;
        let q = apply(&inst, &[x], &opts()).unwrap();
        assert!(rel(q.value, 4.0 / 3.0 * x.powf(-0.25)) < 1e-9, "{q:?}");
        let comm = OperatorInstance::commutator(
            &s,
            vec![InputFunction::Radial(RadialFunction::power(1.0, -0.25))],
            vec![RadialFunction::new(Expr::Radius.ln())],
        )
        .unwrap();
        let c = apply_radial_closed_form(&comm, false, &opts()).unwrap();
        assert_eq!(c.method, Method::ClosedForm);
        assert!(rel(c.coefficient.unwrap(), 16.0 / 9.0) < 1e-14, "{c:?}");
        let q = apply(&comm, &[x], &opts()).unwrap();
        assert!(rel(q.value, 16.0 / 9.0 * x.powf(-0.25)) < 1e-8, "{q:?}");
        let z = KernelSpec::parse("0", &["t1"], 1, Domain::UnitCube).unwrap();
        let s0 = Scenario::lebesgue("z", 1, z, vec![2.0]).unwrap();
        let inst = OperatorInstance::radial(&s0, vec![RadialFunction::power(1.0, -0.25)]).unwrap();
        assert_eq!(apply_radial_closed_form(&inst, false, &opts()).unwrap().coefficient, Some(0.0));
    }

    #[test]
    fn hausdorff_mode() {
        let k = KernelSpec::parse("exp(-t1)", &["1/t1"], 1, Domain::PositiveOrthant).unwrap();
        let s = Scenario::lebesgue("hd", 1, k, vec![2.0]).unwrap();
        let inst = OperatorInstance::radial(&s, vec![RadialFunction::power(1.0, -0.5)]).unwrap();
        assert_eq!(inst.mode, OperatorMode::Hausdorff);
        // int e^{-t} t^{1/2} dt = Gamma(3/2)
        let q = apply(&inst, &[4.0], &opts()).unwrap();
        let want = 0.5 * std::f64::consts::PI.sqrt() * 0.5;
        assert!(rel(q.value, want) < 1e-7, "{q:?}");
    }

    #[test]
    fn cutoff_input_has_closed_form() {
        // int_{1/x}^1 t^g dt for f = r^g on r >= 1
        let s = hardy(1);
        let g = -0.7;
        let inst = OperatorInstance::radial(&s, vec![RadialFunction::power(1.0, g).with_inner(1.0)]).unwrap();
        for x in [1.5f64, 10.0, 1e6] {
            let want = x.powf(g) * (1.0 - x.powf(-(1.0 + g))) / (1.0 + g);
            let q = apply(&inst, &[x], &opts()).unwrap();
            assert!(rel(q.value, want) < 1e-10, "{x}: {q:?} vs {want}");
        }
        assert_eq!(apply(&inst, &[0.5], &opts()).unwrap().value, 0.0);
    }

    #[test]
    fn output_norm_matches_semi_analytic_hardy() {
        let s = hardy(1);
        let eps = 0.01;
        let inst = OperatorInstance::radial(&s, vec![RadialFunction::power(1.0, -0.5 - eps).with_inner(1.0)]).unwrap();
        let n = output_lp_norm(&inst, 2.0, &Weight::unweighted(1), &OutputOptions::default()).unwrap();
        let c = 0.5 - eps;
        let sq = 2.0 / (c * c) * (1.0 / (2.0 * eps) - 2.0 / (c + 2.0 * eps) + 1.0 / (2.0 * c + 2.0 * eps));
        let fnorm = (2.0f64 / (2.0 * eps)).sqrt();
        assert!(rel(n.value, sq.sqrt()) < 1e-8, "{n:?} vs {}", sq.sqrt());
        assert!(n.value / fnorm < 2.0);
    }

    #[test]
    fn separable_kernels_factor() {
        let k = KernelSpec::parse("2*t1^0.5*t2*t3^2", &["t1", "t2^2", "t3"], 4, Domain::UnitCube).unwrap();
        let s = Scenario::lebesgue("sep", 1, k, vec![6.0, 6.0, 6.0]).unwrap();
        let inst = OperatorInstance::radial(&s, vec![RadialFunction::power(1.0, -0.25); 3]).unwrap();
        assert_eq!(inst.factored().unwrap().unwrap().parts.len(), 3);
        let c = apply_radial_closed_form(&inst, false, &opts()).unwrap();
        let q = apply(&inst, &[1.7], &opts()).unwrap();
        assert!(rel(q.value, c.coefficient.unwrap() * 1.7f64.powf(-0.75)) < 1e-10, "{q:?} {c:?}");
        let k = KernelSpec::parse("t4^(-1)", &["t1"], 4, Domain::UnitCube).unwrap();
        let s = Scenario::lebesgue("free", 1, k, vec![2.0]).unwrap();
        let inst = OperatorInstance::radial(&s, vec![RadialFunction::power(1.0, -0.25)]).unwrap();
        assert!(apply(&inst, &[1.0], &opts()).unwrap().is_divergent());
    }

    #[test]
    fn point_inputs_are_multilinear() {
        let k = KernelSpec::parse("t1 + t2", &["t1", "t1*t2"], 2, Domain::UnitCube).unwrap();
        let s = Scenario::lebesgue("ml", 1, k, vec![4.0, 4.0]).unwrap();
        let f = |y: &[f64]| (y[0]).sin();
        let g = |y: &[f64]| 1.0 + y[0] * y[0];
        let h = |y: &[f64]| (-y[0].abs()).exp();
        let u = |a: InputFunction, b: InputFunction| {
            apply(&OperatorInstance::new(&s, vec![a, b]).unwrap(), &[1.7], &opts()).unwrap().value
        };
        let lhs = u(InputFunction::point(move |y| 2.0 * f(y) - 3.0 * g(y)), InputFunction::point(h));
        let rhs = 2.0 * u(InputFunction::point(f), InputFunction::point(h))
            - 3.0 * u(InputFunction::point(g), InputFunction::point(h));
        assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
    }
}
