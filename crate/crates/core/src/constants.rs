//! The sharp norm constants as integrals of `psi` against powers of `|s_k|`.
//!
//! | kind     | domain        | per-slot factor                               |
//! |----------|---------------|-----------------------------------------------|
//! | `A`      | `[0,1]^n`     | `|s_k|^{-(d+a_k)/p_k}`                        |
//! | `A_star` | `(0,inf)^n`   | `|s_k|^{-(d+a_k)/p_k}`                        |
//! | `B`      | `[0,1]^n`     | `|s_k|^{(d+a_k) l_k}`                         |
//! | `B_star` | `(0,inf)^n`   | `|s_k|^{(d+a_k) l_k}`                         |
//! | `C`      | `[0,1]^n`     | `|s_k|^{(d+a_k) l_k}`                         |
//! | `D`      | `[0,1]^n`     | `|s_k|^{(d+a_k) l_k} |log|s_k||`              |

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::expr::{ClosedFormClass, ClosedFormValue, Endpoint, Expr, VarRef};
use crate::kernels::{Domain, KernelSpec, Scenario};
use crate::quad::{integrate_positive_orthant, integrate_unit_cube, AxisHint, FaceHints, QuadOptions, QuadResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstantKind {
    A,
    #[serde(rename = "A_star")]
    AStar,
    B,
    #[serde(rename = "B_star")]
    BStar,
    C,
    D,
}

impl ConstantKind {
    pub fn parse(s: &str) -> Option<ConstantKind> {
        Some(match s {
            "A" => ConstantKind::A,
            "A_star" | "A*" => ConstantKind::AStar,
            "B" => ConstantKind::B,
            "B_star" | "B*" => ConstantKind::BStar,
            "C" => ConstantKind::C,
            "D" => ConstantKind::D,
            _ => return None,
        })
    }

    pub fn domain(self) -> Domain {
        match self {
            ConstantKind::AStar | ConstantKind::BStar => Domain::PositiveOrthant,
            _ => Domain::UnitCube,
        }
    }

    fn needs_lambda(self) -> bool {
        !matches!(self, ConstantKind::A | ConstantKind::AStar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpConstant {
    pub kind: ConstantKind,
    /// `None` when the integral is `+inf`.
    pub value: Option<f64>,
    pub divergent: bool,
    pub method: Method,
    /// Power of `|s_k|` used for each slot.
    pub exponents: Vec<f64>,
    pub integrand: String,
    pub quadrature: Option<QuadResult>,
    /// The reading with exponent `-(d+a_k) l_k / p_k` (B and B_star only).
    pub as_printed: Option<Box<SharpConstant>>,
}

impl SharpConstant {
    pub fn finite(&self) -> Option<f64> {
        self.value
    }
}

#[derive(Debug, Clone, Default)]
pub struct ConstantOptions {
    pub force_quadrature: bool,
    pub quad: QuadOptions,
    /// Skip the as-printed variant.
    pub skip_variant: bool,
}

/// Per-slot exponents for a kind.
pub fn slot_exponents(kind: ConstantKind, s: &Scenario) -> Result<Vec<f64>> {
    let df = s.d as f64;
    let alpha = s.alpha_k();
    if kind.needs_lambda() {
        let Some(l) = s.lambda.as_ref() else {
            return input(format!("constant {kind:?} needs lambda exponents"));
        };
        Ok((0..s.m()).map(|k| (df + alpha[k]) * l[k]).collect())
    } else {
        Ok((0..s.m()).map(|k| -(df + alpha[k]) / s.p[k]).collect())
    }
}

fn slot_factor(s_k: &Expr, e: f64, with_log: bool) -> Expr {
    let base = s_k.clone().abs();
    let mut factors = vec![base.clone().powf(e)];
    if with_log {
        factors.push(base.ln().abs());
    }
    Expr::product(factors)
}

/// `prod_k |s_k|^{e_k} [|log|s_k||]` without `psi`.
pub fn dilation_factor(kernel: &KernelSpec, exponents: &[f64], with_log: bool) -> Expr {
    Expr::product(kernel.s.iter().zip(exponents).map(|(s, e)| slot_factor(s, *e, with_log)).collect())
}

/// Face hints for `psi * rest`, honouring declared psi exponents.
pub fn face_hints(kernel: &KernelSpec, rest: &Expr, class: &ClosedFormClass) -> FaceHints {
    let n = kernel.n;
    if let ClosedFormClass::Monomial { exponents, .. } | ClosedFormClass::LogMonomial { exponents, .. } = class {
        let logs = match class {
            ClosedFormClass::LogMonomial { log_factors, .. } => log_factors.clone(),
            _ => Vec::new(),
        };
        if kernel.domain == Domain::UnitCube {
            let axes = (0..n)
                .map(|i| AxisHint {
                    zero: exponents[i],
                    log_zero: logs.iter().filter(|l| l.weights[i] != 0.0).count() as f64,
                    ..Default::default()
                })
                .collect();
            return FaceHints::exact(axes);
        }
    }
    let far = match kernel.domain {
        Domain::UnitCube => Endpoint::One,
        Domain::PositiveOrthant => Endpoint::Infinity,
    };
    let axes = (0..n)
        .map(|i| {
            let v = VarRef::T(i);
            let r0 = rest.asymptote(v, Endpoint::Zero);
            let r1 = rest.asymptote(v, far);
            let (p0, p1) = match kernel.face_exponents.as_ref().and_then(|h| h.get(i)) {
                Some(h) => ((h.zero, h.log_zero), (h.one, h.log_one)),
                None => {
                    let a0 = kernel.psi.asymptote(v, Endpoint::Zero);
                    let a1 = kernel.psi.asymptote(v, far);
                    ((a0.exponent, a0.log_power), (a1.exponent, a1.log_power))
                }
            };
            AxisHint {
                zero: p0.0 + r0.exponent,
                one: p1.0 + r1.exponent,
                log_zero: (p0.1 + r0.log_power).max(0.0),
                log_one: (p1.1 + r1.log_power).max(0.0),
            }
        })
        .collect();
    FaceHints::guessed(axes)
}

/// Integrate `psi * rest` over the kernel's domain, exactly when possible.
pub fn kernel_integral(
    kernel: &KernelSpec,
    rest: &Expr,
    force_quadrature: bool,
    quad: &QuadOptions,
) -> (Option<f64>, Method, Option<QuadResult>, String) {
    let integrand = Expr::product(vec![kernel.psi.clone(), rest.clone()]);
    let text = integrand.to_string();
    let class = integrand.classify(kernel.n);
    if kernel.domain == Domain::UnitCube && !force_quadrature {
        if let Some(v) = class.unit_cube_integral() {
            let value = match v {
                ClosedFormValue::Finite(x) => Some(x),
                ClosedFormValue::Divergent => None,
            };
            return (value, Method::ClosedForm, None, text);
        }
    }
    let hints = face_hints(kernel, rest, &class);
    let n = kernel.n;
    let f = |t: &[f64]| integrand.eval_t(t).unwrap_or(f64::NAN);
    let r = match kernel.domain {
        Domain::UnitCube => integrate_unit_cube(f, n, &hints, quad),
        Domain::PositiveOrthant => integrate_positive_orthant(f, n, &hints, quad),
    };
    let value = if r.is_divergent() { None } else { Some(r.value) };
    (value, Method::Quadrature, Some(r), text)
}

pub fn compute_constant(kind: ConstantKind, s: &Scenario, opts: &ConstantOptions) -> Result<SharpConstant> {
    if kind.domain() != s.kernel.domain {
        return input(format!("constant {kind:?} needs a {:?} kernel", kind.domain()));
    }
    let exponents = slot_exponents(kind, s)?;
    let with_log = kind == ConstantKind::D;
    let rest = dilation_factor(&s.kernel, &exponents, with_log);
    let (value, method, quadrature, integrand) = kernel_integral(&s.kernel, &rest, opts.force_quadrature, &opts.quad);
    let as_printed = if matches!(kind, ConstantKind::B | ConstantKind::BStar) && !opts.skip_variant {
        let ep: Vec<f64> = exponents.iter().zip(&s.p).map(|(e, pk)| -e / pk).collect();
        let rest = dilation_factor(&s.kernel, &ep, false);
        let (v, m, q, text) = kernel_integral(&s.kernel, &rest, opts.force_quadrature, &opts.quad);
        Some(Box::new(SharpConstant {
            kind,
            value: v,
            divergent: v.is_none(),
            method: m,
            exponents: ep,
            integrand: text,
            quadrature: q,
            as_printed: None,
        }))
    } else {
        None
    };
    Ok(SharpConstant { kind, value, divergent: value.is_none(), method, exponents, integrand, quadrature, as_printed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{Mode, Scenario};
    use crate::weights::Weight;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn hardy(p: f64) -> Scenario {
        Scenario::lebesgue("hardy", 1, KernelSpec::coordinate(1), vec![p]).unwrap()
    }

    #[test]
    fn hardy_constant() {
        let c = compute_constant(ConstantKind::A, &hardy(2.0), &ConstantOptions::default()).unwrap();
        assert_eq!(c.method, Method::ClosedForm);
        assert!(rel(c.value.unwrap(), 2.0) < 1e-15);
        let o = ConstantOptions { force_quadrature: true, ..Default::default() };
        let c = compute_constant(ConstantKind::A, &hardy(1.5), &o).unwrap();
        assert!(rel(c.value.unwrap(), 3.0) < 1e-8, "{c:?}");
    }

    #[test]
    fn divergent_at_p_one() {
        let c = compute_constant(ConstantKind::A, &hardy(1.0), &ConstantOptions::default()).unwrap();
        assert!(c.divergent);
    }

    #[test]
    fn bilinear_monomial() {
        let s = Scenario::lebesgue("m2", 1, KernelSpec::coordinate(2), vec![4.0, 4.0]).unwrap();
        let c = compute_constant(ConstantKind::A, &s, &ConstantOptions::default()).unwrap();
        assert!(rel(c.value.unwrap(), 16.0 / 9.0) < 1e-14);
    }

    #[test]
    fn log_constant() {
        let s = Scenario::new(
            "d",
            1,
            Mode::Commutator,
            KernelSpec::coordinate(1),
            vec![Weight::unweighted(1)],
            vec![2.0],
            Some(vec![4.0]),
            Some(vec![-0.25]),
        )
        .unwrap();
        let c = compute_constant(ConstantKind::D, &s, &ConstantOptions::default()).unwrap();
        assert_eq!(c.method, Method::ClosedForm);
        assert!(rel(c.value.unwrap(), 16.0 / 9.0) < 1e-14);
        let o = ConstantOptions { force_quadrature: true, ..Default::default() };
        let c = compute_constant(ConstantKind::D, &s, &o).unwrap();
        assert!(rel(c.value.unwrap(), 16.0 / 9.0) < 1e-8);
    }

    #[test]
    fn hausdorff_gamma() {
        let k = KernelSpec::parse("exp(-t1)", &["1/t1"], 1, Domain::PositiveOrthant).unwrap();
        for p in [2.0, 3.0] {
            let s = Scenario::lebesgue("h", 1, k.clone(), vec![p]).unwrap();
            let c = compute_constant(ConstantKind::AStar, &s, &ConstantOptions::default()).unwrap();
            let want = statrs::function::gamma::gamma(1.0 + 1.0 / p);
            assert!(rel(c.value.unwrap(), want) < 1e-7, "{c:?}");
        }
    }

    #[test]
    fn kind_domain_mismatch() {
        assert!(compute_constant(ConstantKind::AStar, &hardy(2.0), &ConstantOptions::default()).is_err());
        assert!(compute_constant(ConstantKind::B, &hardy(2.0), &ConstantOptions::default()).is_err());
    }

    #[test]
    fn zero_kernel() {
        let k = KernelSpec::parse("0", &["t1"], 1, Domain::UnitCube).unwrap();
        let s = Scenario::lebesgue("z", 1, k, vec![2.0]).unwrap();
        let c = compute_constant(ConstantKind::A, &s, &ConstantOptions::default()).unwrap();
        assert_eq!(c.value, Some(0.0));
    }
}
