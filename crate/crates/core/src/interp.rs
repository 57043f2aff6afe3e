//! K-functionals for the `(L_1, L_∞)` step-function couple and for weighted
//! `(ℓ_{p0}(w0), ℓ_{p1}(w1))` couples, the `R_s` relation test, and the
//! orbit-operator constructor on `(ℓ_1ⁿ, ℓ_∞ⁿ)`.

use serde::{Deserialize, Serialize};

use crate::error::{LatticeError, Result};
use crate::exec::Exec;
use crate::norms::LatticeSpec;
use crate::numeric::{golden_min, log_grid, log_log_slope, lp_norm, Exponent};
use crate::rearrangement::{SeqVector, StepFunction};

pub const MAJORIZATION_TOL: f64 = 1e-12;
pub const VALIDATOR_TOL: f64 = 1e-10;
/// Tail exponents closer than this to zero are treated as critical.
pub const CRITICAL_BAND: f64 = 0.02;

/// An ordered pair of hosts on a common index set or on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupleSpec {
    pub x0: LatticeSpec,
    pub x1: LatticeSpec,
}

/// Element of the sum space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Element {
    Step(StepFunction),
    Seq(SeqVector),
}

impl Element {
    pub fn is_zero(&self) -> bool {
        match self {
            Element::Step(f) => f.is_zero(),
            Element::Seq(v) => v.entries.iter().all(|x| *x == 0.0),
        }
    }
}

/// `(p, weights)` of a sequence host; `None` weights mean all ones.
fn weighted(spec: &LatticeSpec) -> Option<(f64, Option<&[f64]>)> {
    match spec {
        LatticeSpec::Lp { p } => Some((p.0, None)),
        LatticeSpec::C0 => Some((f64::INFINITY, None)),
        LatticeSpec::WeightedLp { p, weights } => Some((p.0, Some(weights.as_slice()))),
        _ => None,
    }
}

fn weights_for(w: Option<&[f64]>, n: usize) -> Result<Vec<f64>> {
    match w {
        None => Ok(vec![1.0; n]),
        Some(w) if w.len() >= n => Ok(w[..n].to_vec()),
        Some(w) => Err(LatticeError::InvalidInput(format!("{} weights for a vector of length {n}", w.len()))),
    }
}

impl CoupleSpec {
    pub fn l1_linf() -> Self {
        CoupleSpec { x0: LatticeSpec::lp(1.0), x1: LatticeSpec::lp(f64::INFINITY) }
    }

    pub fn weighted(p0: f64, w0: Vec<f64>, p1: f64, w1: Vec<f64>) -> Self {
        CoupleSpec {
            x0: LatticeSpec::WeightedLp { p: Exponent(p0), weights: w0 },
            x1: LatticeSpec::WeightedLp { p: Exponent(p1), weights: w1 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.x0.validate()?;
        self.x1.validate()?;
        if weighted(&self.x0).is_none() || weighted(&self.x1).is_none() {
            return Err(LatticeError::UnsupportedCouple(format!("({}, {})", self.x0.name(), self.x1.name())));
        }
        Ok(())
    }

    fn is_l1_linf(&self) -> bool {
        matches!(weighted(&self.x0), Some((p, None)) if p == 1.0)
            && matches!(weighted(&self.x1), Some((p, None)) if p.is_infinite())
    }
}

/// `inf{‖x₀‖_{X₀} + t‖x₁‖_{X₁} : x = x₀ + x₁}`.
pub fn k_functional(t: f64, x: &Element, couple: &CoupleSpec) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(LatticeError::InvalidInput(format!("t must be positive and finite, got {t}")));
    }
    couple.validate()?;
    match x {
        Element::Step(f) => {
            if !couple.is_l1_linf() {
                return Err(LatticeError::UnsupportedCouple(
                    "step functions are supported on the (L1, L_inf) couple only".into(),
                ));
            }
            Ok(k_step_l1_linf(t, f))
        }
        Element::Seq(v) => {
            let (p0, w0) = weighted(&couple.x0).unwrap_or((1.0, None));
            let (p1, w1) = weighted(&couple.x1).unwrap_or((1.0, None));
            let n = v.len();
            let xs: Vec<f64> = v.entries.iter().map(|x| x.abs()).collect();
            Ok(k_weighted(t, &xs, p0, &weights_for(w0, n)?, p1, &weights_for(w1, n)?))
        }
    }
}

/// Truncation at level `c`: `x₀ = (|x| − c)₊`, `x₁ = min(|x|, c)`. The cost
/// is piecewise linear in `c` with breakpoints at the atom values.
fn k_step_l1_linf(t: f64, f: &StepFunction) -> f64 {
    let cost = |c: f64| -> f64 {
        let head: f64 = f.atoms().iter().map(|&(v, m)| (v.abs() - c).max(0.0) * m).sum();
        head + t * c.min(f.max_abs())
    };
    let mut best = cost(0.0);
    for &(v, _) in f.atoms() {
        best = best.min(cost(v.abs()));
    }
    best
}

fn weighted_norm(u: &[f64], w: &[f64], p: f64) -> f64 {
    let s: Vec<f64> = u.iter().zip(w).map(|(a, b)| a * b).collect();
    lp_norm(&s, p)
}

fn k_weighted(t: f64, xs: &[f64], p0: f64, w0: &[f64], p1: f64, w1: &[f64]) -> f64 {
    if xs.iter().all(|x| *x == 0.0) {
        return 0.0;
    }
    if p0 == 1.0 && p1 == 1.0 {
        return xs.iter().zip(w0.iter().zip(w1)).map(|(x, (a, b))| x * a.min(t * b)).sum();
    }
    if p0.is_infinite() && !p1.is_infinite() {
        // K(t, x; X₀, X₁) = t·K(1/t, x; X₁, X₀)
        return t * k_weighted(1.0 / t, xs, p1, w1, p0, w0);
    }
    if p1.is_infinite() {
        return k_level(t, xs, p0, w0, w1);
    }
    k_smooth(t, xs, p0, w0, p1, w1)
}

/// `p1 = ∞`: the `X₁` part is `min(|x_i|, λ/w1_i)` for a level `λ`, and the
/// cost `‖(|x| − λ/w1)₊‖_{p0,w0} + tλ` is convex in `λ`.
fn k_level(t: f64, xs: &[f64], p0: f64, w0: &[f64], w1: &[f64]) -> f64 {
    let cost = |lam: f64| -> f64 {
        let head: Vec<f64> = xs.iter().zip(w1).map(|(x, b)| (x - lam / b).max(0.0)).collect();
        weighted_norm(&head, w0, p0) + t * lam
    };
    let mut knots: Vec<f64> = xs.iter().zip(w1).map(|(x, b)| x * b).collect();
    knots.push(0.0);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut best = knots.iter().map(|&l| cost(l)).fold(f64::INFINITY, f64::min);
    if p0 != 1.0 {
        // the minimum of a convex function lies next to the best knot
        let i = knots
            .iter()
            .enumerate()
            .min_by(|a, b| cost(*a.1).total_cmp(&cost(*b.1)))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let lo = knots[i.saturating_sub(1)];
        let hi = knots[(i + 1).min(knots.len() - 1)];
        if hi > lo {
            let (_, v) = golden_min(cost, lo, hi, 1e-14 * hi.max(1e-300), 200);
            best = best.min(v);
        }
    }
    best
}

/// Both exponents finite, not both one. Optimal splits `u` satisfy
/// `w0^{p0} u^{p0−1} = μ w1^{p1} (x−u)^{p1−1}` coordinatewise for one
/// scalar `μ`, so the search runs over `μ` and is then polished by
/// coordinate descent.
fn k_smooth(t: f64, xs: &[f64], p0: f64, w0: &[f64], p1: f64, w1: &[f64]) -> f64 {
    let cost = |u: &[f64]| -> f64 {
        let rest: Vec<f64> = xs.iter().zip(u).map(|(x, a)| x - a).collect();
        weighted_norm(u, w0, p0) + t * weighted_norm(&rest, w1, p1)
    };
    let split = |mu: f64| -> Vec<f64> {
        xs.iter()
            .zip(w0.iter().zip(w1))
            .map(|(&x, (&a, &b))| {
                if x == 0.0 {
                    return 0.0;
                }
                // g(u) = a^{p0} u^{p0−1} − μ b^{p1} (x−u)^{p1−1} is increasing in u
                let g = |u: f64| a.powf(p0) * u.powf(p0 - 1.0) - mu * b.powf(p1) * (x - u).powf(p1 - 1.0);
                if g(0.0) >= 0.0 {
                    return 0.0;
                }
                if g(x) <= 0.0 {
                    return x;
                }
                crate::numeric::bisect_increasing(g, 0.0, x, 1e-15)
            })
            .collect()
    };
    let mut u: Vec<f64> = vec![0.0; xs.len()];
    let mut best = cost(&u);
    let whole = cost(xs);
    if whole < best {
        best = whole;
        u = xs.to_vec();
    }
    let grid = log_grid(1e-12, 1e12, 97);
    let vals: Vec<f64> = grid.iter().map(|&m| cost(&split(m))).collect();
    let i = (0..vals.len()).min_by(|a, b| vals[*a].total_cmp(&vals[*b])).unwrap_or(0);
    let lo = grid[i.saturating_sub(1)].ln();
    let hi = grid[(i + 1).min(grid.len() - 1)].ln();
    let (lm, v) = golden_min(|l| cost(&split(l.exp())), lo, hi, 1e-13, 200);
    if v < best {
        best = v;
        u = split(lm.exp());
    }
    // coordinate polish
    for _ in 0..50 {
        let before = best;
        for j in 0..xs.len() {
            if xs[j] == 0.0 {
                continue;
            }
            let mut y = u.clone();
            let (a, v) = golden_min(
                |a| {
                    y[j] = a;
                    cost(&y)
                },
                0.0,
                xs[j],
                1e-14 * xs[j],
                200,
            );
            if v < best {
                best = v;
                u[j] = a;
            }
        }
        if before - best <= 1e-15 * best {
            break;
        }
    }
    best
}

/// Sampled K-functional on a grid of `t` values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub element: Element,
    pub couple: CoupleSpec,
}

impl KCurve {
    /// Violations of positivity, monotonicity, concavity and of `K(t)/t`
    /// being nonincreasing, each at relative tolerance `tol`.
    pub fn violations(&self, tol: f64) -> Vec<String> {
        let (t, k) = (&self.grid, &self.values);
        let scale = k.iter().cloned().fold(0.0, f64::max).max(1e-300);
        let mut out = Vec::new();
        for i in 0..k.len() {
            if k[i] < -tol * scale {
                out.push(format!("negative value at t = {}", t[i]));
            }
        }
        for i in 1..k.len() {
            if k[i] < k[i - 1] - tol * k[i - 1].abs().max(1e-300) {
                out.push(format!("decrease between t = {} and {}", t[i - 1], t[i]));
            }
            if k[i] / t[i] > k[i - 1] / t[i - 1] * (1.0 + tol) {
                out.push(format!("K(t)/t increases between t = {} and {}", t[i - 1], t[i]));
            }
        }
        for i in 1..k.len().saturating_sub(1) {
            // chord test: K(t_i) above the chord through its neighbours
            let lam = (t[i] - t[i - 1]) / (t[i + 1] - t[i - 1]);
            let chord = (1.0 - lam) * k[i - 1] + lam * k[i + 1];
            if k[i] < chord - tol * chord.abs().max(k[i].abs()).max(1e-300) {
                out.push(format!("concavity fails at t = {}", t[i]));
            }
        }
        out
    }
}

pub fn k_curve(x: &Element, couple: &CoupleSpec, grid: &[f64], exec: Exec) -> Result<KCurve> {
    let values = exec.map(grid, |&t| k_functional(t, x, couple)).into_iter().collect::<Result<Vec<_>>>()?;
    Ok(KCurve { grid: grid.to_vec(), values, element: x.clone(), couple: couple.clone() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RsGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    /// Decades at each end used for the tail regressions.
    pub tail_decades: f64,
}

impl Default for RsGrid {
    fn default() -> Self {
        RsGrid { t_min: 1e-6, t_max: 1e6, points: 121, tail_decades: 2.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RsVerdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tail {
    /// Exponent `α` in `w(t) ~ t^α`; absent when `w` vanishes there.
    pub exponent: Option<f64>,
    /// `w` is constant and nonzero across the tail window.
    pub flat: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RsReport {
    pub s: Exponent,
    pub grid: Vec<f64>,
    pub w: Vec<f64>,
    /// `Σ w^s Δ(ln t)` over the grid (trapezoid rule); `sup w` when `s = ∞`.
    pub integral: f64,
    pub sup_w: f64,
    pub tail_zero: Tail,
    pub tail_infinity: Tail,
    pub verdict: RsVerdict,
}

/// Breakpoints of `K(·, x)` where the ratio of two such curves can peak.
fn breakpoints(x: &Element, couple: &CoupleSpec) -> Vec<f64> {
    match x {
        Element::Step(f) => {
            let mut acc = 0.0;
            f.decreasing_rearrangement()
                .atoms()
                .iter()
                .map(|a| {
                    acc += a.1;
                    acc
                })
                .collect()
        }
        Element::Seq(v) => {
            if couple.is_l1_linf() {
                (1..=v.len()).map(|k| k as f64).collect()
            } else {
                let (p0, w0) = weighted(&couple.x0).unwrap_or((1.0, None));
                let (p1, w1) = weighted(&couple.x1).unwrap_or((1.0, None));
                match (p0 == 1.0 && p1 == 1.0, weights_for(w0, v.len()), weights_for(w1, v.len())) {
                    (true, Ok(a), Ok(b)) => a.iter().zip(&b).map(|(x, y)| x / y).collect(),
                    _ => Vec::new(),
                }
            }
        }
    }
}

fn tail(ts: &[f64], ws: &[f64]) -> Tail {
    let nz: Vec<(f64, f64)> = ts.iter().zip(ws).filter(|(_, w)| **w > 0.0).map(|(t, w)| (*t, *w)).collect();
    if nz.len() < ts.len() || nz.len() < 2 {
        return Tail { exponent: None, flat: false };
    }
    let (lo, hi) = nz.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), (_, w)| (a.min(*w), b.max(*w)));
    let xs: Vec<f64> = nz.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = nz.iter().map(|p| p.1).collect();
    Tail { exponent: Some(log_log_slope(&xs, &ys)), flat: hi - lo <= 1e-9 * hi }
}

/// Decides whether `K(t, y) ≤ w(t) K(t, x)` with `∫ w^s dt/t < ∞` using the
/// pointwise ratio `w = K(·, y)/K(·, x)`.
pub fn rs_relation_test(
    x: &Element,
    y: &Element,
    cx: &CoupleSpec,
    cy: &CoupleSpec,
    s: Exponent,
    grid: &RsGrid,
    exec: Exec,
) -> Result<RsReport> {
    if x.is_zero() {
        return Err(LatticeError::ZeroDenominator);
    }
    let mut ts = log_grid(grid.t_min, grid.t_max, grid.points.max(3));
    ts.extend(breakpoints(x, cx).into_iter().chain(breakpoints(y, cy)).filter(|t| *t > grid.t_min && *t < grid.t_max));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let kx = k_curve(x, cx, &ts, exec)?;
    let ky = k_curve(y, cy, &ts, exec)?;
    let mut w = Vec::with_capacity(ts.len());
    for (a, b) in kx.values.iter().zip(&ky.values) {
        if *a <= 0.0 {
            return Err(LatticeError::ZeroDenominator);
        }
        w.push(b / a);
    }
    let sup_w = w.iter().cloned().fold(0.0, f64::max);
    let span = grid.tail_decades * std::f64::consts::LN_10;
    let (l0, l1) = (grid.t_min.ln() + span, grid.t_max.ln() - span);
    let pick = |keep: &dyn Fn(f64) -> bool| -> (Vec<f64>, Vec<f64>) {
        ts.iter().zip(&w).filter(|(t, _)| keep(t.ln())).map(|(t, w)| (*t, *w)).unzip()
    };
    let (t0, w0) = pick(&|l| l <= l0);
    let (t1, w1) = pick(&|l| l >= l1);
    let tail_zero = tail(&t0, &w0);
    let tail_infinity = tail(&t1, &w1);
    let (integral, verdict) = if s.is_infinite() {
        let grows = tail_zero.exponent.is_some_and(|a| a < -CRITICAL_BAND && !tail_zero.flat)
            || tail_infinity.exponent.is_some_and(|a| a > CRITICAL_BAND && !tail_infinity.flat);
        (sup_w, if grows { RsVerdict::Fails } else { RsVerdict::Holds })
    } else {
        let mut acc = 0.0;
        for i in 1..ts.len() {
            acc += 0.5 * (w[i].powf(s.0) + w[i - 1].powf(s.0)) * (ts[i] / ts[i - 1]).ln();
        }
        // decay at 0 needs α > 0, decay at ∞ needs α < 0
        let judge = |tl: &Tail, sign: f64| -> RsVerdict {
            match tl.exponent {
                None => RsVerdict::Holds,
                Some(_) if tl.flat => RsVerdict::Fails,
                Some(a) if sign * a > CRITICAL_BAND => RsVerdict::Holds,
                Some(a) if sign * a < -CRITICAL_BAND => RsVerdict::Fails,
                Some(_) => RsVerdict::Inconclusive,
            }
        };
        let v = match (judge(&tail_zero, 1.0), judge(&tail_infinity, -1.0)) {
            (RsVerdict::Fails, _) | (_, RsVerdict::Fails) => RsVerdict::Fails,
            (RsVerdict::Holds, RsVerdict::Holds) => RsVerdict::Holds,
            _ => RsVerdict::Inconclusive,
        };
        (acc, v)
    };
    Ok(RsReport { s, grid: ts, w, integral, sup_w, tail_zero, tail_infinity, verdict })
}

fn sorted_abs(v: &[f64]) -> Vec<f64> {
    let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    a
}

/// First `k` (1-based) with `Σ_{i≤k} y*_i > C·Σ_{i≤k} x*_i`.
pub fn majorization_violation(x: &[f64], y: &[f64], c: f64) -> Option<usize> {
    let n = x.len().max(y.len());
    let (mut xs, mut ys) = (sorted_abs(x), sorted_abs(y));
    xs.resize(n, 0.0);
    ys.resize(n, 0.0);
    let (mut sx, mut sy) = (0.0, 0.0);
    for k in 0..n {
        sx += xs[k];
        sy += ys[k];
        if sy > c * sx * (1.0 + MAJORIZATION_TOL) + f64::MIN_POSITIVE {
            return Some(k + 1);
        }
    }
    None
}

/// `K(t, y) ≤ C·K(t, x)` for all `t` on `(ℓ_1ⁿ, ℓ_∞ⁿ)`, checked at the
/// integer breakpoints.
pub fn cm_majorization_check(x: &SeqVector, y: &SeqVector, c: f64) -> bool {
    majorization_violation(x.as_slice(), y.as_slice(), c).is_none()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitOperator {
    /// Row-major, `len(y) × len(x)`.
    pub matrix: Vec<Vec<f64>>,
    pub norm_l1: f64,
    pub norm_linf: f64,
    pub residual: f64,
}

/// Column and row absolute-sum norms and `‖Tx − y‖_∞`.
pub fn validate_operator(t: &[Vec<f64>], x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let cols = x.len();
    let norm_l1 = (0..cols).map(|j| t.iter().map(|r| r[j].abs()).sum::<f64>()).fold(0.0, f64::max);
    let norm_linf = t.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let residual = t
        .iter()
        .zip(y)
        .map(|(r, yi)| (r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - yi).abs())
        .fold(0.0, f64::max);
    (norm_l1, norm_linf, residual)
}

fn sort_order(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    idx
}

/// Builds `T` with `Tx = y` and `‖T‖_{ℓ_1→ℓ_1}, ‖T‖_{ℓ_∞→ℓ_∞} ≤ 1`.
///
/// On decreasing rearrangements: raise the tail of `y*` to a water level to
/// get `z ≥ y*` with `z ≺ x*`, reach `z` from `x*` by T-transforms, then
/// scale rows by `y*/z`. Permutations and signs map back.
pub fn cm_orbit_operator(x: &SeqVector, y: &SeqVector) -> Result<OrbitOperator> {
    let (xv, yv) = (x.as_slice(), y.as_slice());
    if xv.iter().all(|v| *v == 0.0) {
        return Err(LatticeError::InvalidInput("x must be nonzero".into()));
    }
    if let Some(k) = majorization_violation(xv, yv, 1.0) {
        return Err(LatticeError::MajorizationFailure { k });
    }
    let n = xv.len().max(yv.len());
    let (mut xp, mut yp) = (xv.to_vec(), yv.to_vec());
    xp.resize(n, 0.0);
    yp.resize(n, 0.0);
    let (ox, oy) = (sort_order(&xp), sort_order(&yp));
    let xs: Vec<f64> = ox.iter().map(|&i| xp[i].abs()).collect();
    let ys: Vec<f64> = oy.iter().map(|&i| yp[i].abs()).collect();
    let total: f64 = xs.iter().sum();
    let level = {
        let fill = |l: f64| ys.iter().map(|v| v.max(l)).sum::<f64>();
        if fill(0.0) >= total {
            0.0
        } else {
            crate::numeric::bisect_increasing(|l| fill(l) - total, 0.0, xs[0], 1e-16)
        }
    };
    let z: Vec<f64> = ys.iter().map(|v| v.max(level)).collect();
    // doubly stochastic d with d·x* = z
    let mut d: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut v = xs.clone();
    let eps = 1e-15 * total;
    for _ in 0..2 * n {
        let Some(j) = (0..n).rev().find(|&j| v[j] > z[j] + eps) else { break };
        let Some(k) = (j + 1..n).find(|&k| v[k] < z[k] - eps) else { break };
        let delta = (v[j] - z[j]).min(z[k] - v[k]);
        let lam = 1.0 - delta / (v[j] - v[k]);
        let (rj, rk) = (d[j].clone(), d[k].clone());
        for c in 0..n {
            d[j][c] = lam * rj[c] + (1.0 - lam) * rk[c];
            d[k][c] = (1.0 - lam) * rj[c] + lam * rk[c];
        }
        let (vj, vk) = (v[j], v[k]);
        v[j] = lam * vj + (1.0 - lam) * vk;
        v[k] = (1.0 - lam) * vj + lam * vk;
    }
    let mut t = vec![vec![0.0; xv.len()]; yv.len()];
    for (i, &ri) in oy.iter().enumerate() {
        if ri >= yv.len() || ys[i] == 0.0 {
            continue;
        }
        let scale = ys[i] / z[i];
        let sy = yp[ri].signum();
        for (j, &cj) in ox.iter().enumerate() {
            if cj >= xv.len() || xp[cj] == 0.0 {
                continue;
            }
            t[ri][cj] = sy * xp[cj].signum() * scale * d[i][j];
        }
    }
    let (norm_l1, norm_linf, residual) = validate_operator(&t, xv, yv);
    if norm_l1 > 1.0 + VALIDATOR_TOL || norm_linf > 1.0 + VALIDATOR_TOL || residual > VALIDATOR_TOL * total.max(1.0) {
        return Err(LatticeError::InvalidInput(format!(
            "orbit operator failed validation: l1 {norm_l1}, linf {norm_linf}, residual {residual}"
        )));
    }
    Ok(OrbitOperator { matrix: t, norm_l1, norm_linf, residual })
}
