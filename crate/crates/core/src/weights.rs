//! Homogeneous weights `w(x) = |x|^alpha * A(x/|x|)` and their polar geometry.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{input, Error, Result};
use crate::expr::Expr;
use crate::quad::{integrate_interval, AxisHint, QuadOptions};

/// Angular factor `A` of a homogeneous weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Angular {
    Constant {
        c: f64,
    },
    /// `scale * |x_1/|x||^exponent`
    FirstCoordinate {
        scale: f64,
        exponent: f64,
    },
    /// Profile in the polar angle `t1` (d = 2) or `t1 in {0, pi}` (d = 1).
    Profile {
        phi: Expr,
    },
    Combination {
        terms: Vec<(f64, Angular)>,
    },
    /// `prod A_k^{e_k}`; produced by [`Weight::product`].
    Product {
        factors: Vec<(Angular, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub d: usize,
    pub degree: f64,
    pub angular: Angular,
}

/// Surface measure of the unit sphere in `R^d` (2 for d = 1).
pub fn unit_sphere_area(d: usize) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 2.0) * unit_sphere_area(d - 2),
    }
}

fn polar_angle(xi: &[f64]) -> f64 {
    match xi.len() {
        1 => {
            if xi[0] >= 0.0 {
                0.0
            } else {
                PI
            }
        }
        _ => {
            let a = xi[1].atan2(xi[0]);
            if a < 0.0 {
                a + 2.0 * PI
            } else {
                a
            }
        }
    }
}

impl Angular {
    fn eval(&self, xi: &[f64]) -> Result<f64> {
        Ok(match self {
            Angular::Constant { c } => *c,
            Angular::FirstCoordinate { scale, exponent } => {
                let u = xi[0].abs();
                if u == 0.0 && *exponent < 0.0 {
                    return Err(Error::Divergent("first-coordinate weight on x_1 = 0".into()));
                }
                scale * u.powf(*exponent)
            }
            Angular::Profile { phi } => phi.eval_t(&[polar_angle(xi)])?,
            Angular::Combination { terms } => {
                let mut s = 0.0;
                for (c, a) in terms {
                    s += c * a.eval(xi)?;
                }
                s
            }
            Angular::Product { factors } => {
                let mut s = 1.0;
                for (a, e) in factors {
                    s *= a.eval(xi)?.powf(*e);
                }
                s
            }
        })
    }

    /// `Some(g)` with `A(xi) = g(|xi_1|)` when the factor only sees `|x_1|/|x|`.
    fn is_zonal(&self) -> bool {
        match self {
            Angular::Constant { .. } | Angular::FirstCoordinate { .. } => true,
            Angular::Profile { .. } => false,
            Angular::Combination { terms } => terms.iter().all(|(_, a)| a.is_zonal()),
            Angular::Product { factors } => factors.iter().all(|(a, _)| a.is_zonal()),
        }
    }

    /// Most negative power of `|x_1|` that the factor may carry.
    fn first_coordinate_singularity(&self) -> f64 {
        match self {
            Angular::Constant { .. } | Angular::Profile { .. } => 0.0,
            Angular::FirstCoordinate { exponent, .. } => exponent.min(0.0),
            Angular::Combination { terms } => {
                terms.iter().map(|(_, a)| a.first_coordinate_singularity()).fold(0.0, f64::min)
            }
            Angular::Product { factors } => factors.iter().map(|(a, e)| e * a.first_coordinate_singularity()).sum(),
        }
    }

    fn uses_profile(&self) -> bool {
        match self {
            Angular::Profile { .. } => true,
            Angular::Constant { .. } | Angular::FirstCoordinate { .. } => false,
            Angular::Combination { terms } => terms.iter().any(|(_, a)| a.uses_profile()),
            Angular::Product { factors } => factors.iter().any(|(a, _)| a.uses_profile()),
        }
    }

    fn closed_form_sphere(&self, d: usize) -> Option<Result<f64>> {
        match self {
            Angular::Constant { c } => Some(Ok(c * unit_sphere_area(d))),
            Angular::FirstCoordinate { scale, exponent } => {
                if d == 1 {
                    return Some(Ok(2.0 * scale));
                }
                if *exponent <= -1.0 {
                    return Some(Err(Error::Divergent(format!(
                        "|x_1/|x||^{exponent} is not integrable on the sphere"
                    ))));
                }
                let e = *exponent;
                let df = d as f64;
                Some(Ok(scale * 2.0 * PI.powf((df - 1.0) / 2.0) * gamma((e + 1.0) / 2.0) / gamma((df + e) / 2.0)))
            }
            Angular::Combination { terms } => {
                let mut s = 0.0;
                for (c, a) in terms {
                    match a.closed_form_sphere(d)? {
                        Ok(v) => s += c * v,
                        Err(e) => return Some(Err(e)),
                    }
                }
                Some(Ok(s))
            }
            Angular::Profile { .. } | Angular::Product { .. } => None,
        }
    }
}

impl Weight {
    pub fn power(d: usize, degree: f64) -> Weight {
        Weight { d, degree, angular: Angular::Constant { c: 1.0 } }
    }

    pub fn scaled_power(d: usize, c: f64, degree: f64) -> Weight {
        Weight { d, degree, angular: Angular::Constant { c } }
    }

    pub fn unweighted(d: usize) -> Weight {
        Weight::power(d, 0.0)
    }

    /// Positive combination of weights of the same degree and dimension.
    pub fn combination(terms: Vec<(f64, Weight)>) -> Result<Weight> {
        let Some((_, first)) = terms.first() else { return input("empty weight combination") };
        let (d, degree) = (first.d, first.degree);
        if terms.iter().any(|(c, w)| *c <= 0.0 || w.d != d || w.degree != degree) {
            return input("combination needs positive coefficients and a common degree and dimension");
        }
        Ok(Weight {
            d,
            degree,
            angular: Angular::Combination { terms: terms.into_iter().map(|(c, w)| (c, w.angular)).collect() },
        })
    }

    /// `prod w_k^{e_k}`, again homogeneous of degree `sum e_k alpha_k`.
    pub fn product(factors: &[(Weight, f64)]) -> Result<Weight> {
        let Some((first, _)) = factors.first() else { return input("empty weight product") };
        let d = first.d;
        if factors.iter().any(|(w, _)| w.d != d) {
            return input("weight product needs a common dimension");
        }
        let degree = factors.iter().map(|(w, e)| w.degree * e).sum();
        let mut scale = 1.0;
        let mut first_exp = 0.0;
        let mut simple = true;
        for (w, e) in factors {
            match &w.angular {
                Angular::Constant { c } => scale *= c.powf(*e),
                Angular::FirstCoordinate { scale: s, exponent } => {
                    scale *= s.powf(*e);
                    first_exp += exponent * e;
                }
                _ => simple = false,
            }
        }
        let angular = if !simple {
            Angular::Product { factors: factors.iter().map(|(w, e)| (w.angular.clone(), *e)).collect() }
        } else if first_exp == 0.0 {
            Angular::Constant { c: scale }
        } else {
            Angular::FirstCoordinate { scale, exponent: first_exp }
        };
        Ok(Weight { d, degree, angular })
    }

    pub fn is_power_weight(&self) -> bool {
        matches!(self.angular, Angular::Constant { .. })
    }

    pub fn locally_integrable(&self) -> bool {
        self.degree > -(self.d as f64)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.d {
            return input(format!("point has {} coordinates, weight lives in R^{}", x.len(), self.d));
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            if self.degree > 0.0 {
                return Ok(0.0);
            }
            if let (0.0, Angular::Constant { c }) = (self.degree, &self.angular) {
                return Ok(*c);
            }
            return Err(Error::Expr(crate::expr::ExprError::Domain("weight evaluated at the origin".into())));
        }
        let xi: Vec<f64> = x.iter().map(|v| v / r).collect();
        Ok(r.powf(self.degree) * self.angular.eval(&xi)?)
    }

    /// Radial weight value `w(r xi)` for unit `xi`.
    pub fn eval_polar(&self, r: f64, xi: &[f64]) -> Result<f64> {
        Ok(r.powf(self.degree) * self.angular.eval(xi)?)
    }

    /// `w(S_d)`; for `d = 1` this is `w(1) + w(-1) = 2 w(1)` for even weights.
    pub fn sphere_integral(&self) -> Result<f64> {
        let v = self.sphere_integral_inner()?;
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Divergent(format!("sphere integral {v} is not a positive finite number")));
        }
        Ok(v)
    }

    fn sphere_integral_inner(&self) -> Result<f64> {
        if let Some(v) = self.angular.closed_form_sphere(self.d) {
            return v;
        }
        match self.d {
            1 => Ok(self.angular.eval(&[1.0])? + self.angular.eval(&[-1.0])?),
            2 => {
                let a = &self.angular;
                let f = |th: f64| a.eval(&[th.cos(), th.sin()]).unwrap_or(f64::NAN);
                let mut o = QuadOptions::with_tol(1e-10);
                o.breakpoints = vec![vec![PI / 2.0, PI, 1.5 * PI]];
                let r = integrate_interval(f, 0.0, 2.0 * PI, AxisHint::default(), &o);
                if r.is_divergent() || !r.value.is_finite() {
                    return Err(Error::Divergent("angular profile is not integrable".into()));
                }
                Ok(r.value)
            }
            d => {
                if self.angular.uses_profile() || !self.angular.is_zonal() {
                    return input("angular profiles are only supported for d <= 2");
                }
                // zonal: |S^{d-2}| * int_{-1}^{1} g(u) (1-u^2)^{(d-3)/2} du
                let a = &self.angular;
                let df = d as f64;
                let g = |u: f64| {
                    let rest = (1.0 - u * u).max(0.0).sqrt();
                    let mut xi = vec![0.0; d];
                    xi[0] = u;
                    xi[1] = rest;
                    a.eval(&xi).unwrap_or(f64::NAN) * (1.0 - u * u).powf((df - 3.0) / 2.0)
                };
                let hint =
                    AxisHint { zero: a.first_coordinate_singularity(), one: (df - 3.0) / 2.0, ..Default::default() };
                let r = integrate_interval(g, 0.0, 1.0, hint, &QuadOptions::with_tol(1e-11));
                if !r.is_converged() {
                    return Err(Error::Divergent("zonal sphere integral did not converge".into()));
                }
                Ok(2.0 * unit_sphere_area(d - 1) * r.value)
            }
        }
    }

    /// `w(B(0,R)) = w(S_d) R^{d+alpha} / (d+alpha)`.
    pub fn ball_integral(&self, radius: f64) -> Result<f64> {
        if !self.locally_integrable() {
            return Err(Error::Divergent(format!(
                "weight of degree {} is not integrable near the origin in R^{}",
                self.degree, self.d
            )));
        }
        if radius <= 0.0 {
            return input("ball radius must be positive");
        }
        let s = self.d as f64 + self.degree;
        Ok(self.sphere_integral()? * radius.powf(s) / s)
    }

    /// Structural checks: dimension, profile support, positivity and
    /// antipodal evenness on a sample of directions, finite sphere integral.
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return input("dimension must be positive");
        }
        if self.d > 2 && self.angular.uses_profile() {
            return input("angular profiles are only supported for d <= 2");
        }
        if let Angular::Combination { terms } = &self.angular {
            if terms.iter().any(|(c, _)| *c <= 0.0) {
                return input("combination coefficients must be positive");
            }
        }
        let dirs: Vec<Vec<f64>> = match self.d {
            1 => vec![vec![1.0]],
            2 => (0..64)
                .map(|j| {
                    let th = (j as f64 + 0.37) * PI / 64.0;
                    vec![th.cos(), th.sin()]
                })
                .collect(),
            d => (0..64)
                .map(|j| {
                    let u = -1.0 + (j as f64 + 0.5) / 32.0;
                    let mut xi = vec![0.0; d];
                    xi[0] = u;
                    xi[1] = (1.0 - u * u).sqrt();
                    xi
                })
                .collect(),
        };
        for xi in dirs {
            let a = self.angular.eval(&xi)?;
            let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
            let b = self.angular.eval(&neg)?;
            if a.is_nan() || a <= 0.0 {
                return input(format!("weight is not positive in direction {xi:?}"));
            }
            if (a - b).abs() > 1e-12 * a.abs() {
                return input(format!("angular part is not even: {a} vs {b} at {xi:?}"));
            }
        }
        self.sphere_integral().map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Weight::power(1, 2.0).eval(&[-3.0]).unwrap(), 9.0);
        assert_eq!(Weight::unweighted(2).eval(&[0.3, -7.0]).unwrap(), 1.0);
        assert_eq!(Weight::power(3, -1.0).eval(&[0.0, 0.0, 2.0]).unwrap(), 0.5);
        assert_eq!(Weight::power(2, 1.5).eval(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(Weight::power(2, -0.5).eval(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn sphere_examples() {
        assert_eq!(Weight::scaled_power(1, 3.0, 0.7).sphere_integral().unwrap(), 6.0);
        assert!(rel(Weight::unweighted(2).sphere_integral().unwrap(), 2.0 * PI) < 1e-15);
        assert!(rel(Weight::unweighted(3).sphere_integral().unwrap(), 4.0 * PI) < 1e-15);
    }

    #[test]
    fn ball_examples() {
        assert!(rel(Weight::unweighted(1).ball_integral(2.0).unwrap(), 4.0) < 1e-15);
        assert!(rel(Weight::unweighted(2).ball_integral(1.0).unwrap(), PI) < 1e-15);
        assert!(rel(Weight::power(3, -1.0).ball_integral(2.0).unwrap(), 8.0 * PI) < 1e-15);
        assert!(matches!(Weight::power(2, -2.0).ball_integral(1.0), Err(Error::Divergent(_))));
    }

    #[test]
    fn first_coordinate_closed_form_matches_zonal_quadrature() {
        for d in [3usize, 4] {
            for e in [-0.5, 0.0, 1.0, 2.5] {
                let w = Weight { d, degree: 1.0, angular: Angular::FirstCoordinate { scale: 2.0, exponent: e } };
                let closed = w.sphere_integral().unwrap();
                let p = Weight {
                    d,
                    degree: 1.0,
                    angular: Angular::Product {
                        factors: vec![(Angular::FirstCoordinate { scale: 2.0, exponent: e }, 1.0)],
                    },
                };
                let numeric = p.sphere_integral().unwrap();
                assert!(rel(numeric, closed) < 1e-9, "d={d} e={e}: {numeric} vs {closed}");
            }
        }
    }

    #[test]
    fn two_dimensional_profile() {
        let phi = parse("1 + min(t1, 1)", 1).unwrap();
        let w = Weight { d: 2, degree: 0.0, angular: Angular::Profile { phi } };
        // not even under theta -> theta + pi
        assert!(w.validate().is_err());
        let w = Weight { d: 2, degree: 1.0, angular: Angular::FirstCoordinate { scale: 1.0, exponent: 2.0 } };
        // int cos^2 = pi
        assert!(rel(w.sphere_integral().unwrap(), PI) < 1e-13);
        w.validate().unwrap();
    }

    #[test]
    fn product_weight_degree() {
        let w = Weight::product(&[(Weight::power(2, 1.0), 0.5), (Weight::power(2, -0.5), 0.5)]).unwrap();
        assert!((w.degree - 0.25).abs() < 1e-15);
        assert_eq!(w.angular, Angular::Constant { c: 1.0 });
    }
}
