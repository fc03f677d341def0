//! Singularity-aware integration over `(0,1)^n` and `(0,inf)^n`.
//!
//! Every axis is first graded by a piecewise power map with a break at
//! `u = 1/2`,
//!
//! ```text
//! t = (2u)^k0 / 2            for u < 1/2
//! t = 1 - (2(1-u))^k1 / 2    for u > 1/2
//! ```
//!
//! with `k` chosen from the face exponent hint so that `t^a dt` becomes a
//! polynomial in `u`. For `n <= 3` the graded integrand is integrated with
//! adaptive tensor Gauss-Kronrod (7/15) panels; for larger `n` a randomized
//! lattice rule supplies the estimate and a confidence half-width.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadStatus {
    Converged,
    Divergent,
    MaxCellsReached,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadMethod {
    TensorGaussKronrod,
    RandomizedLattice,
    SymbolicDivergence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub status: QuadStatus,
    pub cells_used: usize,
    pub evaluations: usize,
    /// Integrand samples that came back non-finite.
    pub nonfinite: usize,
    pub method: QuadMethod,
}

impl QuadResult {
    pub fn is_converged(&self) -> bool {
        self.status == QuadStatus::Converged
    }

    pub fn is_divergent(&self) -> bool {
        self.status == QuadStatus::Divergent
    }

    pub fn divergent(method: QuadMethod) -> QuadResult {
        QuadResult {
            value: f64::INFINITY,
            abs_error: f64::INFINITY,
            rel_error: f64::INFINITY,
            status: QuadStatus::Divergent,
            cells_used: 0,
            evaluations: 0,
            nonfinite: 0,
            method,
        }
    }
}

/// Face exponents of one axis: the integrand behaves like `t^zero` near
/// `t = 0` and `(1-t)^one` near `t = 1`, possibly times powers of logs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AxisHint {
    pub zero: f64,
    pub one: f64,
    pub log_zero: f64,
    pub log_one: f64,
}

impl AxisHint {
    pub fn at_zero(a: f64) -> AxisHint {
        AxisHint { zero: a, ..AxisHint::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FaceHints {
    pub axes: Vec<AxisHint>,
    /// The exponents come from an exact classification, so `a <= -1` is a
    /// proof of divergence rather than a guess.
    pub exact: bool,
}

impl FaceHints {
    pub fn none(n: usize) -> FaceHints {
        FaceHints { axes: vec![AxisHint::default(); n], exact: false }
    }

    pub fn guessed(axes: Vec<AxisHint>) -> FaceHints {
        FaceHints { axes, exact: false }
    }

    pub fn exact(axes: Vec<AxisHint>) -> FaceHints {
        FaceHints { axes, exact: true }
    }

    fn axis(&self, i: usize) -> AxisHint {
        self.axes.get(i).copied().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadOptions {
    /// Relative tolerance; `None` selects the per-dimension default.
    pub tol: Option<f64>,
    pub abs_tol: f64,
    /// Cell budget; `0` selects the per-dimension default.
    pub max_cells: usize,
    pub seed: u64,
    /// Extra panel boundaries per axis, in the original coordinates.
    pub breakpoints: Vec<Vec<f64>>,
    /// Skip the truncation probes that decide divergence after a budget overrun.
    pub probe_divergence: bool,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { tol: None, abs_tol: 0.0, max_cells: 0, seed: 0, breakpoints: Vec::new(), probe_divergence: true }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        QuadOptions { tol: Some(tol), ..Default::default() }
    }
}

pub fn default_tol(n: usize) -> f64 {
    match n {
        0..=2 => 1e-8,
        3 => 1e-6,
        _ => 1e-3,
    }
}

fn default_max_cells(n: usize) -> usize {
    match n {
        0 | 1 => 4_000,
        2 => 20_000,
        _ => 4_000,
    }
}

// 15-point Kronrod rule on [-1,1] in ascending order; Gauss nodes sit at the
// odd positions.
#[allow(clippy::excessive_precision)]
const XK: [f64; 15] = [
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144845693013,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
];
#[allow(clippy::excessive_precision)]
const WK: [f64; 15] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 15] = [
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.417959183673469387755102040816327,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.129484966168869693270611432679082,
    0.0,
];

/// Neumaier compensated sum.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}

fn grading_power(a: f64, logs: f64) -> f64 {
    if !a.is_finite() {
        return 1.0;
    }
    if logs == 0.0 && a >= 0.0 && a.fract() == 0.0 {
        return 1.0;
    }
    let a = a.max(-0.98);
    let target = (1.0 + a).ceil().max(2.0);
    (target / (1.0 + a)).min(30.0)
}

#[derive(Debug, Clone, Copy)]
struct AxisMap {
    k0: f64,
    k1: f64,
}

impl AxisMap {
    fn new(h: AxisHint) -> AxisMap {
        AxisMap { k0: grading_power(h.zero, h.log_zero), k1: grading_power(h.one, h.log_one) }
    }

    #[inline]
    fn map(&self, u: f64) -> (f64, f64) {
        if u < 0.5 {
            let v = 2.0 * u;
            (0.5 * v.powf(self.k0), self.k0 * v.powf(self.k0 - 1.0))
        } else {
            let v = 2.0 * (1.0 - u);
            (1.0 - 0.5 * v.powf(self.k1), self.k1 * v.powf(self.k1 - 1.0))
        }
    }

    fn inverse(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if t >= 1.0 {
            1.0
        } else if t < 0.5 {
            0.5 * (2.0 * t).powf(1.0 / self.k0)
        } else {
            1.0 - 0.5 * (2.0 * (1.0 - t)).powf(1.0 / self.k1)
        }
    }
}

#[derive(Debug, Clone)]
struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
    value: f64,
    axis_err: Vec<f64>,
    err: f64,
    id: u64,
    evals: usize,
    nonfinite: usize,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.id.cmp(&self.id))
    }
}

fn eval_cell<G: Fn(&[f64]) -> f64 + Sync>(g: &G, lo: Vec<f64>, hi: Vec<f64>, id: u64) -> Cell {
    let n = lo.len();
    let half: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (b - a)).collect();
    let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    let mut k_sum = 0.0;
    let mut g_sum = vec![0.0; n];
    let mut nonfinite = 0;
    let total = 15usize.pow(n as u32);
    for _ in 0..total {
        let mut wk = 1.0;
        for i in 0..n {
            x[i] = mid[i] + half[i] * XK[idx[i]];
            wk *= WK[idx[i]];
        }
        let mut v = g(&x);
        if !v.is_finite() {
            nonfinite += 1;
            v = 0.0;
        }
        let fw = v * wk;
        k_sum += fw;
        for j in 0..n {
            let wg = WG[idx[j]];
            if wg != 0.0 {
                g_sum[j] += fw / WK[idx[j]] * wg;
            }
        }
        for i in (0..n).rev() {
            idx[i] += 1;
            if idx[i] < 15 {
                break;
            }
            idx[i] = 0;
        }
    }
    let vol: f64 = half.iter().product();
    let value = k_sum * vol;
    let axis_err: Vec<f64> = g_sum.iter().map(|gs| ((k_sum - gs) * vol).abs()).collect();
    let err = axis_err.iter().sum();
    Cell { lo, hi, value, axis_err, err, id, evals: total, nonfinite }
}

struct Raw {
    value: f64,
    err: f64,
    cells: usize,
    evals: usize,
    nonfinite: usize,
    converged: bool,
}

const BATCH: usize = 16;

fn tensor_adapt<G: Fn(&[f64]) -> f64 + Sync>(
    g: &G,
    cuts: &[Vec<f64>],
    tol: f64,
    abs_tol: f64,
    max_cells: usize,
) -> Raw {
    let n = cuts.len();
    // initial tensor grid over the cut lines
    let mut boxes: Vec<(Vec<f64>, Vec<f64>)> = vec![(Vec::new(), Vec::new())];
    for axis in cuts {
        let mut next = Vec::with_capacity(boxes.len() * (axis.len() - 1));
        for (lo, hi) in &boxes {
            for w in axis.windows(2) {
                let mut l = lo.clone();
                let mut h = hi.clone();
                l.push(w[0]);
                h.push(w[1]);
                next.push((l, h));
            }
        }
        boxes = next;
    }
    let mut next_id = 0u64;
    let initial: Vec<(Vec<f64>, Vec<f64>, u64)> = boxes
        .into_iter()
        .map(|(l, h)| {
            let id = next_id;
            next_id += 1;
            (l, h, id)
        })
        .collect();
    let cells: Vec<Cell> = initial.into_par_iter().map(|(l, h, id)| eval_cell(g, l, h, id)).collect();
    let mut evals = 0usize;
    let mut nonfinite = 0usize;
    let mut heap = BinaryHeap::new();
    let mut frozen = Vec::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for c in cells {
        evals += c.evals;
        nonfinite += c.nonfinite;
        total += c.value;
        total_err += c.err;
        heap.push(c);
    }
    let mut leaves = heap.len();
    let mut converged = false;
    loop {
        if total_err <= (tol * total.abs()).max(abs_tol) {
            converged = true;
            break;
        }
        if leaves >= max_cells || heap.is_empty() {
            break;
        }
        let mut work = Vec::new();
        while work.len() < BATCH {
            let Some(c) = heap.pop() else { break };
            let j = (0..n).max_by(|&a, &b| c.axis_err[a].total_cmp(&c.axis_err[b]).then(b.cmp(&a))).unwrap_or(0);
            let m = 0.5 * (c.lo[j] + c.hi[j]);
            if !(m > c.lo[j] && m < c.hi[j]) || c.err == 0.0 {
                frozen.push(c);
                continue;
            }
            total -= c.value;
            total_err -= c.err;
            let mut h1 = c.hi.clone();
            h1[j] = m;
            let mut l2 = c.lo.clone();
            l2[j] = m;
            work.push((c.lo.clone(), h1, next_id));
            work.push((l2, c.hi.clone(), next_id + 1));
            next_id += 2;
            leaves += 1;
        }
        if work.is_empty() {
            break;
        }
        let children: Vec<Cell> = work.into_par_iter().map(|(l, h, id)| eval_cell(g, l, h, id)).collect();
        for c in children {
            evals += c.evals;
            nonfinite += c.nonfinite;
            total += c.value;
            total_err += c.err;
            heap.push(c);
        }
    }
    let mut all: Vec<Cell> = heap.into_vec();
    all.extend(frozen);
    all.sort_by_key(|c| c.id);
    let value = neumaier_sum(all.iter().map(|c| c.value));
    let err = neumaier_sum(all.iter().map(|c| c.err));
    let converged = converged || err <= (tol * value.abs()).max(abs_tol);
    Raw { value, err, cells: all.len(), evals, nonfinite, converged }
}

fn finish(raw: Raw, status: QuadStatus, method: QuadMethod) -> QuadResult {
    let rel = if raw.value != 0.0 {
        raw.err / raw.value.abs()
    } else if raw.err == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    QuadResult {
        value: raw.value,
        abs_error: raw.err,
        rel_error: rel,
        status,
        cells_used: raw.cells,
        evaluations: raw.evals,
        nonfinite: raw.nonfinite,
        method,
    }
}

fn axis_cuts(map: &AxisMap, extra: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut cuts = vec![lo, hi];
    if lo < 0.5 && 0.5 < hi {
        cuts.push(0.5);
    }
    for &t in extra {
        let u = map.inverse(t);
        if u > lo && u < hi {
            cuts.push(u);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    cuts
}

/// `int_{(0,1)^n} f(t) dt`.
pub fn integrate_unit_cube<F>(f: F, n: usize, hints: &FaceHints, opts: &QuadOptions) -> QuadResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert!(n >= 1, "integration arity must be positive");
    if hints.exact && hints.axes.iter().any(|h| h.zero <= -1.0 || h.one <= -1.0) {
        return QuadResult::divergent(QuadMethod::SymbolicDivergence);
    }
    let tol = opts.tol.unwrap_or_else(|| default_tol(n));
    let maps: Vec<AxisMap> = (0..n).map(|i| AxisMap::new(hints.axis(i))).collect();
    let g = |u: &[f64]| -> f64 {
        let mut t = [0.0f64; 16];
        let mut t_vec;
        let tt: &mut [f64] = if n <= 16 {
            &mut t[..n]
        } else {
            t_vec = vec![0.0; n];
            &mut t_vec[..]
        };
        let mut jac = 1.0;
        for i in 0..n {
            let (ti, ji) = maps[i].map(u[i]);
            if ti <= 0.0 || ti >= 1.0 || ji == 0.0 {
                return 0.0;
            }
            tt[i] = ti;
            jac *= ji;
        }
        f(tt) * jac
    };
    if n >= 4 {
        return lattice(&g, n, tol, opts);
    }
    let max_cells = if opts.max_cells == 0 { default_max_cells(n) } else { opts.max_cells };
    let cuts: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let extra = opts.breakpoints.get(i).map(Vec::as_slice).unwrap_or(&[]);
            axis_cuts(&maps[i], extra, 0.0, 1.0)
        })
        .collect();
    let raw = tensor_adapt(&g, &cuts, tol, opts.abs_tol, max_cells);
    if raw.nonfinite > 0 {
        return finish(raw, QuadStatus::Divergent, QuadMethod::TensorGaussKronrod);
    }
    if raw.converged {
        return finish(raw, QuadStatus::Converged, QuadMethod::TensorGaussKronrod);
    }
    if opts.probe_divergence && probe_diverges(&g, &maps, opts, n, tol, max_cells) {
        return finish(raw, QuadStatus::Divergent, QuadMethod::TensorGaussKronrod);
    }
    finish(raw, QuadStatus::MaxCellsReached, QuadMethod::TensorGaussKronrod)
}

/// Integrate over the cube with each face cut back by `delta` (in the original
/// coordinates) at three depths; growth by more than a factor 10, or
/// increments that stop contracting, mark the integral as divergent.
fn probe_diverges<G: Fn(&[f64]) -> f64 + Sync>(
    g: &G,
    maps: &[AxisMap],
    opts: &QuadOptions,
    n: usize,
    tol: f64,
    max_cells: usize,
) -> bool {
    let mut vals = Vec::new();
    for e in [12, 24, 48] {
        let delta = 2f64.powi(-e);
        let cuts: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let lo = maps[i].inverse(delta);
                let hi = maps[i].inverse(1.0 - delta);
                let extra = opts.breakpoints.get(i).map(Vec::as_slice).unwrap_or(&[]);
                axis_cuts(&maps[i], extra, lo, hi)
            })
            .collect();
        let raw = tensor_adapt(g, &cuts, tol.max(1e-6), opts.abs_tol, max_cells / 4 + 64);
        vals.push(raw.value);
    }
    let (i1, i2, i3) = (vals[0], vals[1], vals[2]);
    if i3.abs() > 10.0 * i1.abs() {
        return true;
    }
    let d1 = (i2 - i1).abs();
    let d2 = (i3 - i2).abs();
    d1 > 1e-6 * i2.abs().max(1e-300) && d2 >= 0.999 * d1
}

fn lattice_generators(n: usize) -> Vec<f64> {
    // generalised golden ratio: root of x^(n+1) = x + 1
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (n as f64 + 1.0));
    }
    (1..=n).map(|i| (1.0 / phi.powi(i as i32)).fract()).collect()
}

/// `count` deterministic points of the Kronecker lattice with offset 1/2,
/// strictly inside the unit cube.
pub fn lattice_points(n: usize, count: usize) -> Vec<Vec<f64>> {
    let gens = lattice_generators(n);
    (0..count).map(|k| gens.iter().map(|g| (0.5 + k as f64 * g).fract()).collect()).collect()
}

fn lattice<G: Fn(&[f64]) -> f64 + Sync>(g: &G, n: usize, tol: f64, opts: &QuadOptions) -> QuadResult {
    const REPLICAS: usize = 16;
    let gens = lattice_generators(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let shifts: Vec<Vec<f64>> = (0..REPLICAS).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect();
    let budget = if opts.max_cells == 0 { 1 << 18 } else { opts.max_cells.max(1024) * 64 };
    let mut points = 1024usize;
    let mut nonfinite_total = 0;
    let mut evals = 0;
    loop {
        let estimates: Vec<(f64, usize)> = shifts
            .par_iter()
            .map(|shift| {
                let mut x = vec![0.0; n];
                let mut bad = 0;
                let vals = (0..points).map(|k| {
                    for i in 0..n {
                        // baker's transform periodizes the graded integrand
                        let y = (shift[i] + (k as f64 + 1.0) * gens[i]).fract();
                        x[i] = 1.0 - (2.0 * y - 1.0).abs();
                    }
                    let v = g(&x);
                    if v.is_finite() {
                        v
                    } else {
                        bad += 1;
                        0.0
                    }
                });
                let s = neumaier_sum(vals.collect::<Vec<_>>());
                (s / points as f64, bad)
            })
            .collect();
        evals += points * REPLICAS;
        nonfinite_total += estimates.iter().map(|e| e.1).sum::<usize>();
        let mean = neumaier_sum(estimates.iter().map(|e| e.0)) / REPLICAS as f64;
        let var = estimates.iter().map(|e| (e.0 - mean).powi(2)).sum::<f64>() / (REPLICAS - 1) as f64;
        let half_width = 3.0 * (var / REPLICAS as f64).sqrt();
        let done = half_width <= (tol * mean.abs()).max(opts.abs_tol);
        if done || points * REPLICAS * 2 > budget {
            let status = if nonfinite_total > 0 {
                QuadStatus::Divergent
            } else if done {
                QuadStatus::Converged
            } else {
                QuadStatus::MaxCellsReached
            };
            let raw = Raw {
                value: mean,
                err: half_width,
                cells: points * REPLICAS,
                evals,
                nonfinite: nonfinite_total,
                converged: done,
            };
            return finish(raw, status, QuadMethod::RandomizedLattice);
        }
        points *= 2;
    }
}

/// `int_{(0,inf)^n} f(t) dt` through `t = v/(1-v)`.
///
/// `hints.axes[i].one` is read as the growth exponent `b` of the integrand as
/// `t_i -> inf` (`f ~ t^b`); it becomes the hint `-b-2` at `v_i = 1`.
pub fn integrate_positive_orthant<F>(f: F, n: usize, hints: &FaceHints, opts: &QuadOptions) -> QuadResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let axes: Vec<AxisHint> = (0..n)
        .map(|i| {
            let h = hints.axis(i);
            AxisHint {
                zero: h.zero,
                one: if h.one.is_finite() { -h.one - 2.0 } else { -h.one.signum() * f64::INFINITY },
                log_zero: h.log_zero,
                log_one: h.log_one,
            }
        })
        .collect();
    let mapped = FaceHints { axes, exact: hints.exact };
    let mut o = opts.clone();
    o.breakpoints = opts.breakpoints.iter().map(|bs| bs.iter().map(|t| t / (1.0 + t)).collect()).collect();
    let g = |v: &[f64]| -> f64 {
        let mut t = [0.0f64; 16];
        let mut jac = 1.0;
        for (i, &vi) in v.iter().enumerate() {
            let w = 1.0 - vi;
            t[i] = vi / w;
            jac /= w * w;
        }
        if jac.is_infinite() {
            return 0.0;
        }
        f(&t[..v.len()]) * jac
    };
    assert!(n <= 16, "orthant integration supports n <= 16");
    integrate_unit_cube(g, n, &mapped, &o)
}

/// `int_a^b f(x) dx` on a finite interval, with face exponents at `a` and `b`.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, hint: AxisHint, opts: &QuadOptions) -> QuadResult
where
    F: Fn(f64) -> f64 + Sync,
{
    let w = b - a;
    let mut o = opts.clone();
    o.breakpoints =
        opts.breakpoints.first().map(|bs| vec![bs.iter().map(|x| (x - a) / w).collect()]).unwrap_or_default();
    integrate_unit_cube(|t: &[f64]| f(a + w * t[0]) * w, 1, &FaceHints::guessed(vec![hint]), &o)
}

/// Local power behaviour `r^exponent * log^logs` of a radial integrand.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RadialHint {
    pub exponent: f64,
    pub logs: f64,
}

/// Combine segment results: values and errors add, the worst status wins.
pub fn combine(parts: &[QuadResult]) -> QuadResult {
    let value = neumaier_sum(parts.iter().map(|r| r.value));
    let abs_error = neumaier_sum(parts.iter().map(|r| r.abs_error));
    let status = if parts.iter().any(|r| r.is_divergent()) {
        QuadStatus::Divergent
    } else if parts.iter().all(|r| r.is_converged()) {
        QuadStatus::Converged
    } else {
        QuadStatus::MaxCellsReached
    };
    QuadResult {
        value: if status == QuadStatus::Divergent { f64::INFINITY } else { value },
        abs_error,
        rel_error: if value != 0.0 { abs_error / value.abs() } else { 0.0 },
        status,
        cells_used: parts.iter().map(|r| r.cells_used).sum(),
        evaluations: parts.iter().map(|r| r.evaluations).sum(),
        nonfinite: parts.iter().map(|r| r.nonfinite).sum(),
        method: parts.first().map(|r| r.method).unwrap_or(QuadMethod::TensorGaussKronrod),
    }
}

/// `int_lo^hi h(r) dr` for `0 <= lo < hi <= inf`.
///
/// A segment touching `r = 0` is integrated in `s` with `r = b s^{1/k}`,
/// `k = a0 + 1`, and a segment reaching infinity with `r = a s^{-1/k}`,
/// `k = -b - 1`; both substitutions turn the leading power into a constant.
/// The range is split at `r = 1` and at the given breakpoints.
pub fn integrate_radial<F>(
    h: F,
    lo: f64,
    hi: f64,
    at_zero: RadialHint,
    at_infinity: RadialHint,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> QuadResult
where
    F: Fn(f64) -> f64 + Sync,
{
    let mut cuts = vec![lo, hi];
    for &b in breakpoints.iter().chain(std::iter::once(&1.0)) {
        if b > lo && b < hi {
            cuts.push(b);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut o = opts.clone();
    o.breakpoints = Vec::new();
    let parts: Vec<QuadResult> =
        cuts.windows(2).map(|w| radial_segment(&h, w[0], w[1], at_zero, at_infinity, &o)).collect();
    combine(&parts)
}

/// Pull the continuation point from `start` toward `limit` until the integrand
/// is a normal float there, so the leading-power tail does not start from an
/// underflowed or overflowed value.
fn representable_end<F: Fn(f64) -> f64>(h: &F, start: f64, limit: f64) -> (f64, f64) {
    let mut r = start;
    loop {
        let v = h(r);
        let ok = v == 0.0 || (v.is_finite() && v.abs() > 1e-280 && v.abs() < 1e280);
        if (ok && v != 0.0) || (r - limit).abs() <= 1e-12 * limit {
            return (r, v);
        }
        // geometric midpoint in log space
        let next = (r.ln() + limit.ln()) / 2.0;
        r = if (next - limit.ln()).abs() < 1e-3 { limit } else { next.exp() };
    }
}

fn radial_segment<F>(h: &F, a: f64, b: f64, z: RadialHint, inf: RadialHint, o: &QuadOptions) -> QuadResult
where
    F: Fn(f64) -> f64 + Sync,
{
    if a == 0.0 {
        if z.exponent.is_finite() && z.exponent > -1.0 {
            let k = z.exponent + 1.0;
            // below r_min the integrand is continued by its leading power,
            // which the substitution maps to a constant
            let (r_min, h_min) = representable_end(h, 1e-250f64.min(0.5 * b), 0.5 * b);
            let g = |s: f64| {
                if s <= 0.0 {
                    return 0.0;
                }
                let log_r = b.ln() + s.ln() / k;
                if log_r < r_min.ln() {
                    if !h_min.is_finite() {
                        return f64::NAN;
                    }
                    if h_min == 0.0 {
                        return 0.0;
                    }
                    return h_min.signum() * (h_min.abs().ln() - z.exponent * r_min.ln() + k * b.ln() - k.ln()).exp();
                }
                let r = log_r.exp();
                h(r) * r / (k * s)
            };
            let hint = AxisHint { zero: 0.0, log_zero: z.logs, ..Default::default() };
            return integrate_interval(g, 0.0, 1.0, hint, o);
        }
        let hint = AxisHint { zero: z.exponent.max(-1.0), log_zero: z.logs, ..Default::default() };
        return integrate_interval(h, 0.0, b, hint, o);
    }
    if b.is_infinite() {
        if inf.exponent.is_finite() && inf.exponent < -1.0 {
            let k = -inf.exponent - 1.0;
            // beyond r_max the integrand is continued by its leading power
            let (r_max, h_max) = representable_end(h, 1e250f64.max(2.0 * a), 2.0 * a);
            let g = |s: f64| {
                if s <= 0.0 {
                    return 0.0;
                }
                let log_r = a.ln() - s.ln() / k;
                if log_r > r_max.ln() {
                    if h_max == 0.0 {
                        return 0.0;
                    }
                    let sign = h_max.signum();
                    return sign
                        * (h_max.abs().ln() - inf.exponent * r_max.ln() + (inf.exponent + 1.0) * a.ln() - k.ln())
                            .exp();
                }
                let r = log_r.exp();
                h(r) * r / (k * s)
            };
            let hint = AxisHint { zero: 0.0, log_zero: inf.logs, ..Default::default() };
            return integrate_interval(g, 0.0, 1.0, hint, o);
        }
        let hints = FaceHints::guessed(vec![AxisHint { one: inf.exponent, log_one: inf.logs, ..Default::default() }]);
        return integrate_positive_orthant(|t: &[f64]| h(a + t[0]), 1, &hints, o);
    }
    integrate_interval(h, a, b, AxisHint::default(), o)
}
