//! Kernel data `(psi, s_1..s_m)`, full scenarios with derived exponents, and
//! the structural conditions of the sharp bounds.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::expr::{parse, Expr};
use crate::quad::{lattice_points, AxisHint};
use crate::weights::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    UnitCube,
    PositiveOrthant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSpec {
    pub m: usize,
    pub n: usize,
    pub psi: Expr,
    pub s: Vec<Expr>,
    pub domain: Domain,
    /// Declared face exponents per variable, overriding the syntactic ones.
    pub face_exponents: Option<Vec<AxisHint>>,
    pub beta: Option<f64>,
}

impl KernelSpec {
    pub fn new(psi: Expr, s: Vec<Expr>, n: usize, domain: Domain) -> Result<KernelSpec> {
        let m = s.len();
        if m == 0 || n == 0 {
            return input("kernel needs m >= 1 dilations and n >= 1 variables");
        }
        if psi.arity() > n || s.iter().any(|e| e.arity() > n) {
            return input(format!("kernel expressions use variables beyond t{n}"));
        }
        if psi.uses_radius() || s.iter().any(Expr::uses_radius) {
            return input("kernel expressions may not use r");
        }
        Ok(KernelSpec { m, n, psi, s, domain, face_exponents: None, beta: None })
    }

    pub fn parse(psi: &str, s: &[&str], n: usize, domain: Domain) -> Result<KernelSpec> {
        let psi = parse(psi, n)?;
        let s = s.iter().map(|e| parse(e, n)).collect::<std::result::Result<Vec<_>, _>>()?;
        KernelSpec::new(psi, s, n, domain)
    }

    /// `psi = 1`, `n = m`, `s_k(t) = t_k`.
    pub fn coordinate(m: usize) -> KernelSpec {
        let s = (1..=m).map(Expr::t).collect();
        KernelSpec::new(Expr::Const(1.0), s, m, Domain::UnitCube).expect("valid kernel")
    }

    pub fn with_beta(mut self, beta: f64) -> KernelSpec {
        self.beta = Some(beta);
        self
    }

    /// Deterministic interior sample of the integration domain.
    pub fn sample_points(&self, count: usize) -> Vec<Vec<f64>> {
        let pts = lattice_points(self.n, count);
        match self.domain {
            Domain::UnitCube => pts,
            Domain::PositiveOrthant => {
                pts.into_iter().map(|v| v.into_iter().map(|x| x / (1.0 - x)).collect()).collect()
            }
        }
    }

    /// psi >= 0 and every s_k finite on 1024 sample points; beta condition
    /// when declared.
    pub fn validate(&self) -> Result<()> {
        for t in self.sample_points(1024) {
            let v = self.psi.eval_t(&t)?;
            if v < 0.0 {
                return input(format!("psi is negative ({v}) at {t:?}"));
            }
            for (k, s) in self.s.iter().enumerate() {
                s.eval_t(&t).map_err(|e| crate::Error::Input(format!("s_{} is not finite at {t:?}: {e}", k + 1)))?;
            }
        }
        if let Some(beta) = self.beta {
            let r = check_beta_condition(self, beta, 33);
            if !r.pass {
                return input(format!(
                    "beta condition fails: margin {} at {:?} for s_{}",
                    r.worst_margin,
                    r.witness,
                    r.slot + 1
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaReport {
    pub pass: bool,
    pub beta: f64,
    pub worst_margin: f64,
    pub witness: Vec<f64>,
    pub slot: usize,
    pub points: usize,
}

/// `|s_k(t)| >= min_i t_i^beta` on the midpoint grid `((j+1/2)/g)^n` for
/// `n <= 3`, on 1024 lattice points otherwise.
pub fn check_beta_condition(k: &KernelSpec, beta: f64, grid: usize) -> BetaReport {
    let n = k.n;
    let points: Vec<Vec<f64>> = if n <= 3 {
        let g = grid.max(1);
        let total = g.pow(n as u32);
        (0..total)
            .map(|mut idx| {
                (0..n)
                    .map(|_| {
                        let j = idx % g;
                        idx /= g;
                        (j as f64 + 0.5) / g as f64
                    })
                    .collect()
            })
            .collect()
    } else {
        lattice_points(n, 1024)
    };
    let mut worst = f64::INFINITY;
    let mut witness = Vec::new();
    let mut slot = 0;
    for t in &points {
        let floor = t.iter().map(|x| x.powf(beta)).fold(f64::INFINITY, f64::min);
        for (i, s) in k.s.iter().enumerate() {
            let v = s.eval_t(t).map(f64::abs).unwrap_or(f64::NAN);
            let margin = if v.is_nan() { f64::NEG_INFINITY } else { v - floor };
            if margin < worst {
                worst = margin;
                witness = t.clone();
                slot = i;
            }
        }
    }
    BetaReport { pass: worst >= -1e-12, beta, worst_margin: worst, witness, slot, points: points.len() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Lebesgue,
    Morrey,
    Commutator,
}

/// Quantities computed from the per-slot data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Derived {
    pub p: f64,
    /// `1/p` as an exact fraction when every input exponent is one.
    pub p_inverse_exact: Option<String>,
    pub alpha: f64,
    pub lambda: Option<f64>,
    pub weight: Weight,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub d: usize,
    pub mode: Mode,
    pub kernel: KernelSpec,
    pub weights: Vec<Weight>,
    pub p: Vec<f64>,
    pub q: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
    pub derived: Derived,
}

fn as_ratio(x: f64) -> Option<Ratio<i64>> {
    let r = Ratio::<i64>::approximate_float(x)?;
    if *r.denom() > 1_000_000 {
        return None;
    }
    let back = *r.numer() as f64 / *r.denom() as f64;
    ((back - x).abs() <= 4.0 * f64::EPSILON * x.abs()).then_some(r)
}

/// `1/p = sum 1/p_k (+ sum 1/q_k)`; exact as a fraction when possible.
pub fn harmonic_exponent(p: &[f64], q: Option<&[f64]>) -> (f64, Option<Ratio<i64>>) {
    let all: Vec<f64> = p.iter().chain(q.unwrap_or(&[]).iter()).copied().collect();
    let exact: Option<Ratio<i64>> = all
        .iter()
        .map(|&x| as_ratio(x).map(|r| r.recip()))
        .try_fold(Ratio::from_integer(0), |acc, r| r.map(|r| acc + r));
    match exact {
        Some(inv) if *inv.numer() != 0 => (*inv.denom() as f64 / *inv.numer() as f64, Some(inv)),
        _ => (1.0 / all.iter().map(|x| 1.0 / x).sum::<f64>(), None),
    }
}

impl Scenario {
    pub fn infer_mode(q: Option<&[f64]>, lambda: Option<&[f64]>) -> Mode {
        match (q, lambda) {
            (Some(_), _) => Mode::Commutator,
            (None, Some(_)) => Mode::Morrey,
            _ => Mode::Lebesgue,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        d: usize,
        mode: Mode,
        kernel: KernelSpec,
        weights: Vec<Weight>,
        p: Vec<f64>,
        q: Option<Vec<f64>>,
        lambda: Option<Vec<f64>>,
    ) -> Result<Scenario> {
        let m = kernel.m;
        if d == 0 {
            return input("dimension must be positive");
        }
        if weights.len() != m || p.len() != m {
            return input(format!("expected {m} weights and exponents, got {} and {}", weights.len(), p.len()));
        }
        if weights.iter().any(|w| w.d != d) {
            return input("every weight must live in R^d");
        }
        if p.iter().any(|pk| !(*pk >= 1.0 && pk.is_finite())) {
            return input("exponents must satisfy 1 <= p_k < inf");
        }
        if q.as_ref().is_some_and(|q| q.len() != m || q.iter().any(|x| !(*x > 1.0 && x.is_finite()))) {
            return input("q needs m entries with 1 < q_k < inf");
        }
        if lambda.as_ref().is_some_and(|l| l.len() != m) {
            return input("lambda needs m entries");
        }
        match mode {
            Mode::Lebesgue => {}
            Mode::Morrey => {
                let Some(l) = &lambda else { return input("Morrey mode needs lambda") };
                for (lk, pk) in l.iter().zip(&p) {
                    if !(*lk >= -1.0 / pk && *lk < 0.0) {
                        return input(format!("Morrey mode needs -1/p_k <= lambda_k < 0, got {lk}"));
                    }
                }
            }
            Mode::Commutator => {
                if q.is_none() || lambda.is_none() {
                    return input("commutator mode needs q and lambda");
                }
                let l = lambda.as_ref().unwrap();
                for (lk, pk) in l.iter().zip(&p) {
                    if !(*lk > -1.0 / pk && *lk < 0.0) {
                        return input(format!("commutator mode needs -1/p_k < lambda_k < 0, got {lk}"));
                    }
                }
            }
        }
        let q_used = if mode == Mode::Commutator { q.as_deref() } else { None };
        let (p_out, exact) = harmonic_exponent(&p, q_used);
        let factors: Vec<(Weight, f64)> = weights.iter().zip(&p).map(|(w, pk)| (w.clone(), p_out / pk)).collect();
        let weight = Weight::product(&factors)?;
        let alpha = weight.degree;
        let lambda_out = match (mode, &lambda) {
            (Mode::Morrey, Some(l)) => {
                let df = d as f64;
                Some(weights.iter().zip(l).map(|(w, lk)| (df + w.degree) * lk).sum::<f64>() / (df + alpha))
            }
            (Mode::Commutator, Some(l)) => Some(l.iter().sum()),
            _ => None,
        };
        let s = Scenario {
            name: name.into(),
            d,
            mode,
            kernel,
            weights,
            p,
            q,
            lambda,
            derived: Derived {
                p: p_out,
                p_inverse_exact: exact.map(|r| r.to_string()),
                alpha,
                lambda: lambda_out,
                weight,
            },
        };
        Ok(s)
    }

    /// Lebesgue scenario with unweighted slots.
    pub fn lebesgue(name: &str, d: usize, kernel: KernelSpec, p: Vec<f64>) -> Result<Scenario> {
        let w = vec![Weight::unweighted(d); kernel.m];
        Scenario::new(name, d, Mode::Lebesgue, kernel, w, p, None, None)
    }

    pub fn m(&self) -> usize {
        self.kernel.m
    }

    pub fn alpha_k(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.degree).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        for w in &self.weights {
            w.validate()?;
            if !w.locally_integrable() {
                return input(format!("weight degree {} must exceed -d", w.degree));
            }
        }
        Ok(())
    }

    /// `1/p - sum 1/p_k - sum 1/q_k` computed in exact fractions when possible.
    pub fn exponent_identity_residual(&self) -> Option<Ratio<i64>> {
        let inv = Ratio::<i64>::from_integer(1) / as_ratio(self.derived.p)?;
        let mut r = inv;
        for pk in &self.p {
            r -= as_ratio(*pk)?.recip();
        }
        if self.mode == Mode::Commutator {
            for qk in self.q.as_deref().unwrap_or(&[]) {
                r -= as_ratio(*qk)?.recip();
            }
        }
        Some(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    /// Other printed readings of the same inequality, with their own slacks.
    pub variants: Vec<ConditionVariant>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionVariant {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

const COND_TOL: f64 = 1e-12;

fn condition(name: &str, lhs: f64, rhs: f64, ge: bool) -> ConditionReport {
    let slack = if ge { lhs - rhs } else { rhs - lhs };
    let scale = lhs.abs().max(rhs.abs()).max(1e-300);
    ConditionReport { name: name.into(), lhs, rhs, slack, pass: slack >= -COND_TOL * scale, variants: Vec::new() }
}

/// `w(S_d) >= prod w_k(S_d)^{p/p_k}`.
pub fn check_walpha_condition(s: &Scenario) -> Result<ConditionReport> {
    let lhs = s.derived.weight.sphere_integral()?;
    let mut rhs = 1.0;
    for (w, pk) in s.weights.iter().zip(&s.p) {
        rhs *= w.sphere_integral()?.powf(s.derived.p / pk);
    }
    Ok(condition("w-alpha", lhs, rhs, true))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BalanceDirection {
    Sufficiency,
    Necessity,
}

/// The sphere-measure balance conditions of the Morrey bounds.
///
/// Sufficiency: `(w(S)/(d+a))^{(1+lp)/p} >= prod (w_k(S)/(d+a_k))^{(1+l_k p_k)/p_k}`.
///
/// Necessity, in the form the extremal computation needs:
/// `(w(S)/(d+a))^l (1+lp)^{1/p} <= prod (w_k(S)/(d+a_k))^{l_k} (1+l_k p_k)^{1/p_k}`,
/// which says the power extremal loses nothing in the norm ratio. The
/// printed form with `w(S)` in every right-hand factor is reported as a
/// variant.
pub fn check_morrey_balance(s: &Scenario, direction: BalanceDirection) -> Result<ConditionReport> {
    let (Some(lam), Some(lk)) = (s.derived.lambda, s.lambda.as_ref()) else {
        return input("Morrey balance needs lambda");
    };
    let df = s.d as f64;
    let p = s.derived.p;
    let a = s.derived.alpha;
    let ws = s.derived.weight.sphere_integral()?;
    let mut sk = Vec::with_capacity(s.m());
    for w in &s.weights {
        sk.push(w.sphere_integral()?);
    }
    match direction {
        BalanceDirection::Sufficiency => {
            let lhs = (ws / (df + a)).powf((1.0 + lam * p) / p);
            let rhs: f64 = (0..s.m())
                .map(|k| {
                    let pk = s.p[k];
                    (sk[k] / (df + s.weights[k].degree)).powf((1.0 + lk[k] * pk) / pk)
                })
                .product();
            Ok(condition("morrey-sufficiency", lhs, rhs, true))
        }
        BalanceDirection::Necessity => {
            let lhs = (ws / (df + a)).powf(lam) * (1.0 + lam * p).powf(1.0 / p);
            let factor = |sph: f64, k: usize| {
                let pk = s.p[k];
                (sph / (df + s.weights[k].degree)).powf(lk[k]) * (1.0 + lk[k] * pk).powf(1.0 / pk)
            };
            let rhs: f64 = (0..s.m()).map(|k| factor(sk[k], k)).product();
            let printed: f64 = (0..s.m()).map(|k| factor(ws, k)).product();
            let mut r = condition("morrey-necessity", lhs, rhs, false);
            r.variants.push(ConditionVariant {
                name: "as-printed (w(S_d) in every factor)".into(),
                lhs,
                rhs: printed,
                slack: printed - lhs,
            });
            Ok(r)
        }
    }
}
