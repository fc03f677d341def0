//! Scenario-file front end: argument parsing, scenario loading, command
//! dispatch and the JSON report.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::constants::{compute_constant, ConstantKind, ConstantOptions};
use crate::error::{input, Error, Result};
use crate::expr::{parse, Expr};
use crate::harness::{
    commutator_witness_check, morrey_extremal_check, sample_points, sharpness_sweep, upper_bound_fuzz, ExtremalOptions,
    FuzzOptions, SweepOptions, WitnessOptions,
};
use crate::kernels::{
    check_beta_condition, check_morrey_balance, check_walpha_condition, BalanceDirection, Domain, KernelSpec, Mode,
    Scenario,
};
use crate::operators::{apply, apply_radial_closed_form, InputFunction, OperatorInstance};
use crate::quad::{AxisHint, QuadOptions};
use crate::spaces::{central_morrey_norm, cmo_norm, lp_norm, make_witness_lp, NormOptions, RadialFunction};
use crate::weights::{Angular, Weight};

/// Exit status contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    Divergent,
    InputError,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Divergent => 2,
            Outcome::InputError => 3,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub d: usize,
}

fn default_domain() -> Domain {
    Domain::UnitCube
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub m: usize,
    pub n: usize,
    #[serde(default = "default_domain")]
    pub domain: Domain,
    pub psi: String,
    pub s: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Per variable `[zero, one]` exponents of `psi`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face_exponents: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSection {
    pub degree: f64,
    /// `constant`, `first-coordinate`, `profile` or `combination`.
    pub kind: String,
    #[serde(default)]
    pub params: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exponents {
    pub p: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Quadrature relative tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<f64>,
    /// Relative tolerance for comparisons against expected values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Task {
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Exit status `suite` expects from this file (default 0).
    #[serde(default)]
    pub expect_exit: Option<i32>,
}

/// The on-disk scenario document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub meta: Meta,
    pub geometry: Geometry,
    #[serde(default)]
    pub kernel: Option<KernelSection>,
    #[serde(default)]
    pub weights: Option<Vec<WeightSection>>,
    #[serde(default)]
    pub exponents: Option<Exponents>,
    #[serde(default)]
    pub task: Task,
}

fn param_f64(v: &Value, key: &str) -> Result<Option<f64>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(x) => x.as_f64().map(Some).ok_or_else(|| Error::Input(format!("parameter {key} must be a number"))),
    }
}

fn angular(d: usize, kind: &str, params: &Value) -> Result<Angular> {
    Ok(match kind {
        "constant" | "power" => Angular::Constant { c: param_f64(params, "c")?.unwrap_or(1.0) },
        "first-coordinate" => Angular::FirstCoordinate {
            scale: param_f64(params, "scale")?.unwrap_or(1.0),
            exponent: param_f64(params, "exponent")?
                .ok_or_else(|| Error::Input("first-coordinate needs exponent".into()))?,
        },
        "profile" => {
            if d > 2 {
                return input("angular profiles need d <= 2");
            }
            let Some(text) = params.get("phi").and_then(Value::as_str) else {
                return input("profile weight needs params.phi");
            };
            Angular::Profile { phi: parse(text, 1)? }
        }
        "combination" => {
            let Some(terms) = params.get("terms").and_then(Value::as_array) else {
                return input("combination weight needs params.terms");
            };
            let mut out = Vec::with_capacity(terms.len());
            for t in terms {
                let c = param_f64(t, "coeff")?.unwrap_or(1.0);
                let kind = t.get("kind").and_then(Value::as_str).unwrap_or("constant");
                let p = t.get("params").cloned().unwrap_or(Value::Null);
                out.push((c, angular(d, kind, &p)?));
            }
            Angular::Combination { terms: out }
        }
        other => return input(format!("unknown weight kind {other}")),
    })
}

impl WeightSection {
    pub fn to_weight(&self, d: usize) -> Result<Weight> {
        let w = Weight { d, degree: self.degree, angular: angular(d, &self.kind, &self.params)? };
        w.validate()?;
        Ok(w)
    }
}

impl KernelSection {
    pub fn to_kernel(&self) -> Result<KernelSpec> {
        if self.s.len() != self.m {
            return input(format!("kernel declares m = {} but lists {} dilations", self.m, self.s.len()));
        }
        let s: Vec<&str> = self.s.iter().map(String::as_str).collect();
        let mut k = KernelSpec::parse(&self.psi, &s, self.n, self.domain)?;
        k.beta = self.beta;
        if let Some(f) = &self.face_exponents {
            if f.len() != self.n {
                return input("face_exponents needs one entry per variable");
            }
            k.face_exponents =
                Some(f.iter().map(|[z, o]| AxisHint { zero: *z, one: *o, ..Default::default() }).collect());
        }
        Ok(k)
    }
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<ScenarioFile> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Resolve and validate the scenario.
    pub fn scenario(&self) -> Result<Scenario> {
        let d = self.geometry.d;
        let (Some(k), Some(e)) = (&self.kernel, &self.exponents) else {
            return input("this command needs kernel and exponents sections");
        };
        let kernel = k.to_kernel()?;
        let weights = match &self.weights {
            Some(ws) => ws.iter().map(|w| w.to_weight(d)).collect::<Result<Vec<_>>>()?,
            None => vec![Weight::unweighted(d); kernel.m],
        };
        let mode = Scenario::infer_mode(e.q.as_deref(), e.lambda.as_deref());
        let s = Scenario::new(
            self.meta.name.clone(),
            d,
            mode,
            kernel,
            weights,
            e.p.clone(),
            e.q.clone(),
            e.lambda.clone(),
        )?;
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Override the quadrature relative tolerance.
    #[arg(long = "tol-override")]
    pub tol_override: Option<f64>,
    /// Seed for randomized steps.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cap on adaptive cells per integral.
    #[arg(long = "max-cells")]
    pub max_cells: Option<usize>,
    /// Radius grid 2^j for j in [-J, J].
    #[arg(long = "radii-J")]
    pub radii_j: Option<i32>,
    /// Write the sweep table as CSV.
    #[arg(long = "emit-csv")]
    pub emit_csv: Option<PathBuf>,
    /// Leave the timestamp out of the report.
    #[arg(long = "no-timestamp")]
    pub no_timestamp: bool,
    /// Report path; stdout when absent.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    pub scenario: PathBuf,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Args)]
pub struct SuiteArgs {
    /// Directory of scenario files; the bundled set when absent.
    pub dir: Option<PathBuf>,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Sharp constant of the scenario.
    Constant(RunArgs),
    /// Pointwise operator values.
    Eval(RunArgs),
    /// Norms of the extremal inputs.
    Norms(RunArgs),
    /// Structural conditions of the sharp bounds.
    CheckConditions(RunArgs),
    /// Epsilon sweep of the extremal family.
    Sharpness(RunArgs),
    /// Randomized upper-bound checks.
    Fuzz(RunArgs),
    /// Morrey power extremal.
    MorreyExtremal(RunArgs),
    /// Commutator witness chain.
    CommutatorWitness(RunArgs),
    /// Every scenario file in a directory.
    Suite(SuiteArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Constant(_) => "constant",
            Command::Eval(_) => "eval",
            Command::Norms(_) => "norms",
            Command::CheckConditions(_) => "check-conditions",
            Command::Sharpness(_) => "sharpness",
            Command::Fuzz(_) => "fuzz",
            Command::MorreyExtremal(_) => "morrey-extremal",
            Command::CommutatorWitness(_) => "commutator-witness",
            Command::Suite(_) => "suite",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hardy-lab", version, about = "Sharp constants for weighted multilinear Hardy-Cesaro operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

fn check(name: &str, pass: bool, detail: Value) -> Check {
    Check { name: name.into(), pass, detail }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario_file: Option<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub resolved: Value,
    pub checks: Vec<Check>,
    pub result: Value,
    pub status: Outcome,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Resolved settings shared by every command.
#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub quad: QuadOptions,
    pub rel: f64,
    pub radii_j: i32,
    pub emit_csv: Option<PathBuf>,
}

impl Settings {
    fn new(file: &ScenarioFile, flags: &Flags) -> Settings {
        let seed = flags.seed.or(file.task.seed).unwrap_or(1);
        let mut quad = QuadOptions::with_tol(flags.tol_override.or(file.task.tolerances.quad).unwrap_or(1e-10));
        quad.seed = seed;
        if let Some(c) = flags.max_cells {
            quad.max_cells = c;
        }
        Settings {
            seed,
            quad,
            rel: file.task.tolerances.rel.unwrap_or(1e-8),
            radii_j: flags.radii_j.unwrap_or(20),
            emit_csv: flags.emit_csv.clone(),
        }
    }

    fn norm(&self) -> NormOptions {
        NormOptions { force_quadrature: false, quad: self.quad.clone(), radii_j: self.radii_j }
    }
}

type Outputs = (Vec<Check>, Value, Outcome);

fn from_checks(checks: &[Check]) -> Outcome {
    if checks.iter().all(|c| c.pass) {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

fn default_kind(s: &Scenario) -> ConstantKind {
    match (s.mode, s.kernel.domain) {
        (Mode::Lebesgue, Domain::UnitCube) => ConstantKind::A,
        (Mode::Lebesgue, Domain::PositiveOrthant) => ConstantKind::AStar,
        (Mode::Morrey, Domain::UnitCube) => ConstantKind::B,
        (Mode::Morrey, Domain::PositiveOrthant) => ConstantKind::BStar,
        (Mode::Commutator, _) => ConstantKind::C,
    }
}

fn cmd_constant(file: &ScenarioFile, s: &Scenario, st: &Settings) -> Result<Outputs> {
    let p = &file.task.params;
    let kinds: Vec<ConstantKind> = match p.get("kind") {
        Some(Value::String(k)) => {
            vec![ConstantKind::parse(k).ok_or_else(|| Error::Input(format!("unknown constant {k}")))?]
        }
        Some(Value::Array(ks)) => ks
            .iter()
            .map(|k| {
                k.as_str().and_then(ConstantKind::parse).ok_or_else(|| Error::Input(format!("unknown constant {k}")))
            })
            .collect::<Result<_>>()?,
        _ if s.mode == Mode::Commutator => vec![ConstantKind::C, ConstantKind::D],
        _ => vec![default_kind(s)],
    };
    let force = p.get("force_quadrature").and_then(Value::as_bool).unwrap_or(false);
    let opts = ConstantOptions { force_quadrature: force, quad: st.quad.clone(), skip_variant: false };
    let mut checks = Vec::new();
    let mut results = Vec::new();
    let mut divergent = false;
    let expected = param_f64(p, "expected")?;
    for kind in kinds {
        let c = compute_constant(kind, s, &opts)?;
        divergent |= c.divergent;
        if let (Some(e), Some(v)) = (expected, c.value) {
            let r = rel_diff(v, e);
            checks.push(check(
                &format!("{kind:?} matches expected"),
                r <= st.rel,
                json!({"expected": e, "rel_diff": r}),
            ));
        }
        results.push(serde_json::to_value(&c)?);
    }
    let outcome = if divergent { Outcome::Divergent } else { from_checks(&checks) };
    let result = if results.len() == 1 { results.remove(0) } else { Value::Array(results) };
    Ok((checks, result, outcome))
}

fn radial_from(v: &Value) -> Result<RadialFunction> {
    let Some(text) = v.get("profile").and_then(Value::as_str) else {
        return input("inputs need a profile expression in r");
    };
    let mut f = RadialFunction::new(parse(text, 0)?);
    f.inner = param_f64(v, "inner")?;
    f.outer = param_f64(v, "outer")?;
    f.origin = param_f64(v, "origin")?.unwrap_or(0.0);
    Ok(f)
}

/// Explicit `params.inputs`, or the mode's extremal family.
fn inputs_for(file: &ScenarioFile, s: &Scenario) -> Result<Vec<RadialFunction>> {
    if let Some(list) = file.task.params.get("inputs").and_then(Value::as_array) {
        return list.iter().map(radial_from).collect();
    }
    let df = s.d as f64;
    Ok(match (&s.lambda, s.mode) {
        (Some(l), Mode::Morrey | Mode::Commutator) => {
            (0..s.m()).map(|k| RadialFunction::power(1.0, (df + s.weights[k].degree) * l[k])).collect()
        }
        _ => {
            let eps = param_f64(&file.task.params, "epsilon")?.unwrap_or(0.01);
            make_witness_lp(s, eps)?.into_iter().map(|w| w.f).collect()
        }
    })
}

fn cmd_eval(file: &ScenarioFile, s: &Scenario, st: &Settings) -> Result<Outputs> {
    let inputs = inputs_for(file, s)?;
    let inst = if s.mode == Mode::Commutator {
        let b = vec![RadialFunction::new(Expr::Radius.ln()); s.m()];
        OperatorInstance::commutator(s, inputs.into_iter().map(InputFunction::Radial).collect(), b)?
    } else {
        OperatorInstance::radial(s, inputs)?
    };
    let points: Vec<Vec<f64>> = match file.task.params.get("points") {
        Some(v) => serde_json::from_value(v.clone())?,
        None => sample_points(s.d, 16, st.seed),
    };
    let cf = apply_radial_closed_form(&inst, false, &st.quad).ok();
    let mut rows = Vec::with_capacity(points.len());
    let mut checks = Vec::new();
    let mut divergent = false;
    for x in &points {
        let q = apply(&inst, x, &st.quad)?;
        divergent |= q.is_divergent();
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let closed = cf.as_ref().and_then(|c| c.coefficient).map(|c| c * r.powf(cf.as_ref().unwrap().exponent));
        if let Some(c) = closed {
            let d = rel_diff(q.value, c);
            checks.push(check("quadrature matches closed form", d <= 1e-4, json!({"x": x, "rel_diff": d})));
        }
        rows.push(
            json!({"x": x, "value": q.value, "abs_error": q.abs_error, "status": q.status, "closed_form": closed}),
        );
    }
    let outcome = if divergent { Outcome::Divergent } else { from_checks(&checks) };
    Ok((checks, json!({"mode": inst.mode, "closed_form": cf, "points": rows}), outcome))
}

fn cmd_norms(file: &ScenarioFile, s: &Scenario, st: &Settings) -> Result<Outputs> {
    let inputs = inputs_for(file, s)?;
    let no = st.norm();
    let forced = NormOptions { force_quadrature: true, ..no.clone() };
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut divergent = false;
    for (k, f) in inputs.iter().enumerate() {
        let (w, pk) = (&s.weights[k], s.p[k]);
        let (a, b) = match (&s.lambda, s.mode) {
            (Some(l), Mode::Morrey | Mode::Commutator) => {
                (central_morrey_norm(f, w, pk, l[k], &no)?, central_morrey_norm(f, w, pk, l[k], &forced)?)
            }
            _ => (lp_norm(f, w, pk, &no)?, lp_norm(f, w, pk, &forced)?),
        };
        divergent |= a.divergent;
        if !a.divergent && !b.divergent {
            let d = rel_diff(b.value, a.value);
            checks.push(check(&format!("slot {} methods agree", k + 1), d <= 1e-6, json!({"rel_diff": d})));
        }
        rows.push(json!({"slot": k + 1, "profile": f, "norm": a, "quadrature": b}));
    }
    let mut symbols = Vec::new();
    if let Some(q) = &s.q {
        let b = RadialFunction::new(Expr::Radius.ln());
        for (k, qk) in q.iter().enumerate() {
            let c = cmo_norm(&b, &s.weights[k], *qk, 0.0, &no)?;
            symbols.push(json!({"slot": k + 1, "symbol": "log(r)", "cmo": c}));
        }
    }
    let outcome = if divergent { Outcome::Divergent } else { from_checks(&checks) };
    Ok((checks, json!({"inputs": rows, "symbols": symbols}), outcome))
}

fn cmd_conditions(s: &Scenario) -> Result<Outputs> {
    let mut checks = Vec::new();
    let w = check_walpha_condition(s)?;
    let power = s.weights.iter().all(Weight::is_power_weight);
    checks.push(check("w-alpha", w.pass, serde_json::to_value(&w)?));
    if power {
        let eq = rel_diff(w.lhs, w.rhs);
        checks.push(check("w-alpha equality for power weights", eq <= 1e-12, json!({"rel_diff": eq})));
    }
    if s.lambda.is_some() && s.mode == Mode::Morrey {
        for dir in [BalanceDirection::Sufficiency, BalanceDirection::Necessity] {
            let r = check_morrey_balance(s, dir)?;
            checks.push(check(&r.name.clone(), r.pass, serde_json::to_value(&r)?));
        }
    }
    if let Some(b) = s.kernel.beta {
        let r = check_beta_condition(&s.kernel, b, 33);
        checks.push(check("beta", r.pass, serde_json::to_value(&r)?));
    }
    let residual = s.exponent_identity_residual();
    checks.push(check(
        "exponent identity",
        residual.is_none_or(|r| *r.numer() == 0),
        json!({"residual": residual.map(|r| r.to_string()), "p": s.derived.p}),
    ));
    let outcome = from_checks(&checks);
    Ok((checks, json!({"derived": s.derived}), outcome))
}

fn cmd_sharpness(file: &ScenarioFile, s: &Scenario, st: &Settings) -> Result<Outputs> {
    let mut o = SweepOptions::default();
    if let Some(g) = file.task.params.get("eps_grid") {
        o.eps_grid = serde_json::from_value(g.clone())?;
    }
    if let Some(t) = param_f64(&file.task.params, "sharpness_tol")? {
        o.sharpness_tol = t;
    }
    if st.quad.max_cells > 0 {
        o.output.inner.max_cells = st.quad.max_cells;
        o.output.outer.max_cells = st.quad.max_cells;
    }
    let r = sharpness_sweep(s, &o)?;
    if let Some(path) = &st.emit_csv {
        std::fs::write(path, r.csv())?;
    }
    let checks = vec![
        check("ratios below target", r.below_target, Value::Null),
        check("ratios nondecreasing", r.monotone, Value::Null),
        check("sharp at smallest epsilon", r.sharp, json!({"limit": r.limit, "target": r.target})),
    ];
    let outcome = if r.target.is_none() { Outcome::Divergent } else { from_checks(&checks) };
    Ok((checks, serde_json::to_value(&r)?, outcome))
}

fn cmd_fuzz(file: &ScenarioFile, st: &Settings) -> Result<Outputs> {
    let p = &file.task.params;
    let get = |k: &str, d: usize| p.get(k).and_then(Value::as_u64).map(|v| v as usize).unwrap_or(d);
    let mut o = FuzzOptions { seed: st.seed, ..Default::default() };
    o.trials = get("trials", o.trials);
    o.max_m = get("max_m", o.max_m);
    o.max_n = get("max_n", o.max_n);
    o.max_d = get("max_d", o.max_d);
    if o.max_m == 0 || o.max_n == 0 || o.max_d == 0 {
        return input("fuzz bounds must be positive");
    }
    let r = upper_bound_fuzz(&o)?;
    let checks = vec![check(
        "no upper-bound violations",
        r.pass,
        json!({"violations": r.violations.len(), "max_ratio_over_constant": r.max_ratio_over_constant}),
    )];
    let outcome = from_checks(&checks);
    Ok((checks, serde_json::to_value(&r)?, outcome))
}

fn cmd_morrey(s: &Scenario, st: &Settings) -> Result<Outputs> {
    let o = ExtremalOptions { norm: st.norm(), ..Default::default() };
    let r = morrey_extremal_check(s, &o)?;
    let checks = vec![
        check("norm ratio equals B times normalization", r.rel_diff <= o.tol, json!({"rel_diff": r.rel_diff})),
        check("power brackets independent of R", r.bracket_spread <= o.flat_tol, json!({"spread": r.bracket_spread})),
        check("direction consistent with balance slack", r.direction_consistent, Value::Null),
    ];
    let outcome =
        if r.constant.divergent || !r.output_norm.is_finite() { Outcome::Divergent } else { from_checks(&checks) };
    Ok((checks, serde_json::to_value(&r)?, outcome))
}

fn cmd_witness(s: &Scenario, st: &Settings) -> Result<Outputs> {
    let o = WitnessOptions { seed: st.seed, norm: st.norm(), quad: st.quad.clone(), ..Default::default() };
    let r = commutator_witness_check(s, &o)?;
    let checks = vec![
        check("pointwise identity", r.pointwise_pass, json!({"max_rel": r.pointwise_max_rel})),
        check(
            "norm ratio equals witness integral",
            r.ratio_pass,
            json!({"measured": r.measured_ratio, "predicted": r.predicted_ratio}),
        ),
        check("finite ratio implies finite D", r.finiteness_pass, Value::Null),
    ];
    let outcome = if r.witness_integral.is_none() { Outcome::Divergent } else { from_checks(&checks) };
    Ok((checks, serde_json::to_value(&r)?, outcome))
}

fn run_file(command: &str, file: &ScenarioFile, st: &Settings) -> Result<(Value, Outputs)> {
    if command == "fuzz" {
        return Ok((Value::Null, cmd_fuzz(file, st)?));
    }
    let s = file.scenario()?;
    let resolved = serde_json::to_value(&s)?;
    let out = match command {
        "constant" => cmd_constant(file, &s, st)?,
        "eval" => cmd_eval(file, &s, st)?,
        "norms" => cmd_norms(file, &s, st)?,
        "check-conditions" => cmd_conditions(&s)?,
        "sharpness" => cmd_sharpness(file, &s, st)?,
        "morrey-extremal" => cmd_morrey(&s, st)?,
        "commutator-witness" => cmd_witness(&s, st)?,
        other => return input(format!("unknown command {other}")),
    };
    Ok((resolved, out))
}

fn timestamp(flags: &Flags) -> Option<u64> {
    if flags.no_timestamp {
        return None;
    }
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).ok().map(|d| d.as_secs())
}

fn file_label(path: &Path) -> Option<String> {
    path.file_name().map(|n| n.to_string_lossy().into_owned())
}

/// Run one command on one scenario file.
pub fn run_command(command: &str, path: &Path, flags: &Flags) -> Report {
    let mut report = Report {
        tool: "hardy-lab",
        version: env!("CARGO_PKG_VERSION"),
        command: command.into(),
        scenario_file: file_label(path),
        seed: flags.seed.unwrap_or(1),
        timestamp: timestamp(flags),
        resolved: Value::Null,
        checks: Vec::new(),
        result: Value::Null,
        status: Outcome::InputError,
        exit_code: Outcome::InputError.code(),
        error: None,
    };
    let file = match ScenarioFile::load(path) {
        Ok(f) => f,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    let st = Settings::new(&file, flags);
    report.seed = st.seed;
    match run_file(command, &file, &st) {
        Ok((resolved, (checks, result, outcome))) => {
            report.resolved = resolved;
            report.checks = checks;
            report.result = result;
            report.status = outcome;
        }
        Err(e) => {
            report.resolved = file.scenario().ok().and_then(|s| serde_json::to_value(s).ok()).unwrap_or(Value::Null);
            report.status = match e {
                Error::Divergent(_) => Outcome::Divergent,
                _ => Outcome::InputError,
            };
            report.error = Some(e.to_string());
        }
    }
    report.exit_code = report.status.code();
    report
}

/// Run every `*.json` in `dir` with its declared command.
pub fn run_suite(dir: &Path, flags: &Flags) -> Report {
    let mut report = Report {
        tool: "hardy-lab",
        version: env!("CARGO_PKG_VERSION"),
        command: "suite".into(),
        scenario_file: None,
        seed: flags.seed.unwrap_or(1),
        timestamp: timestamp(flags),
        resolved: Value::Null,
        checks: Vec::new(),
        result: Value::Null,
        status: Outcome::Pass,
        exit_code: 0,
        error: None,
    };
    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(rd) => {
            rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "json")).collect()
        }
        Err(e) => {
            report.status = Outcome::InputError;
            report.exit_code = 3;
            report.error = Some(format!("cannot read {}: {e}", dir.display()));
            return report;
        }
    };
    files.sort();
    let sub = Flags { emit_csv: None, output: None, no_timestamp: true, ..flags.clone() };
    let mut runs = Vec::new();
    for path in &files {
        let (command, expect) = match ScenarioFile::load(path) {
            Ok(f) => (f.task.command.clone().unwrap_or_else(|| "constant".into()), f.task.expect_exit.unwrap_or(0)),
            Err(_) => ("constant".into(), 0),
        };
        let r = run_command(&command, path, &sub);
        let ok = r.exit_code == expect;
        report.checks.push(check(
            &format!("{} {}", file_label(path).unwrap_or_default(), command),
            ok,
            json!({"exit_code": r.exit_code, "expected_exit": expect}),
        ));
        runs.push(serde_json::to_value(&r).unwrap_or(Value::Null));
    }
    report.result = json!({"runs": runs});
    report.status = from_checks(&report.checks);
    report.exit_code = report.status.code();
    report
}

/// Directory of the scenario files shipped with the crate.
pub fn bundled_scenarios() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios"))
}

fn emit(report: &Report, out: Option<&Path>) -> i32 {
    let text = match serde_json::to_string_pretty(report) {
        Ok(t) => t + "\n",
        Err(e) => {
            eprintln!("error: cannot serialize report: {e}");
            return 3;
        }
    };
    let written = match out {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return 3;
    }
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    eprintln!("{}: {:?} (exit {})", report.command, report.status, report.exit_code);
    if let Some(e) = &report.error {
        eprintln!("  error: {e}");
    }
    for f in failed {
        eprintln!("  failed: {f}");
    }
    report.exit_code
}

/// Parse arguments, run, write the report and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let name = cli.command.name();
    match &cli.command {
        Command::Suite(a) => {
            let dir = a.dir.clone().unwrap_or_else(bundled_scenarios);
            emit(&run_suite(&dir, &a.flags), a.flags.output.as_deref())
        }
        Command::Constant(a)
        | Command::Eval(a)
        | Command::Norms(a)
        | Command::CheckConditions(a)
        | Command::Sharpness(a)
        | Command::Fuzz(a)
        | Command::MorreyExtremal(a)
        | Command::CommutatorWitness(a) => emit(&run_command(name, &a.scenario, &a.flags), a.flags.output.as_deref()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hardy_file() -> ScenarioFile {
        serde_json::from_value(json!({
            "meta": {"name": "hardy-p2"},
            "geometry": {"d": 1},
            "kernel": {"m": 1, "n": 1, "psi": "1", "s": ["t1"], "beta": 1.0},
            "weights": [{"degree": 0, "kind": "constant"}],
            "exponents": {"p": [2]},
            "task": {"command": "constant", "params": {"expected": 2.0}}
        }))
        .unwrap()
    }

    #[test]
    fn resolves_scenario() {
        let s = hardy_file().scenario().unwrap();
        assert_eq!(s.mode, Mode::Lebesgue);
        assert_eq!(s.kernel.beta, Some(1.0));
        let st = Settings::new(&hardy_file(), &Flags::parse_from_empty());
        let (checks, v, o) = cmd_constant(&hardy_file(), &s, &st).unwrap();
        assert_eq!(o, Outcome::Pass);
        assert!(checks[0].pass);
        assert_eq!(v["value"], json!(2.0));
    }

    #[test]
    fn weight_kinds() {
        let w = WeightSection { degree: 1.0, kind: "first-coordinate".into(), params: json!({"exponent": 2.0}) };
        let w = w.to_weight(3).unwrap();
        assert!(matches!(w.angular, Angular::FirstCoordinate { .. }));
        let bad = WeightSection { degree: 0.0, kind: "mystery".into(), params: Value::Null };
        assert!(bad.to_weight(1).is_err());
    }

    impl Flags {
        fn parse_from_empty() -> Flags {
            Flags {
                tol_override: None,
                seed: None,
                max_cells: None,
                radii_j: None,
                emit_csv: None,
                no_timestamp: true,
                output: None,
            }
        }
    }
}
