//! Orlicz functions and the scalar quantities derived from them: inverses,
//! Young conjugates, doubling (Δ₂) constants, dilation functions and the
//! fundamental functions of the supported hosts.

use serde::{Deserialize, Serialize};

use crate::error::{LatticeError, Result};
use crate::norms::LatticeSpec;
use crate::numeric::{golden_max, log_bisect, log_grid};

/// Default truncation of the unbounded `v`-ranges in dilation suprema.
pub const V_MAX: f64 = 1e6;
/// Relative tolerance of the bracketed inversions.
pub const ROOT_TOL: f64 = 1e-12;

/// An increasing convex function `M` on `[0, ∞)` with `M(0) = 0` and
/// `M(1) = 1`.
///
/// * `Power(p)`: `M(t) = t^p`.
/// * `PowerLog(p, a)`: `M(t) = t^p (1 + ln max(t, 1))^a`; a pure power below 1.
/// * `Tabulated`: the piecewise-linear interpolant of convex knots, rescaled
///   so that `M(1) = 1`. Beyond the last knot [`OrliczFunction::value`]
///   extrapolates with the last slope while [`OrliczFunction::evaluate`]
///   reports a domain overflow.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OrliczRepr", into = "OrliczRepr")]
pub enum OrliczFunction {
    Power { p: f64 },
    PowerLog { p: f64, a: f64 },
    Tabulated { knots: Vec<(f64, f64)> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
enum OrliczRepr {
    Power { p: f64 },
    Powerlog { p: f64, a: f64 },
    Tabulated { knots: Vec<[f64; 2]> },
}

impl TryFrom<OrliczRepr> for OrliczFunction {
    type Error = LatticeError;

    fn try_from(r: OrliczRepr) -> Result<Self> {
        match r {
            OrliczRepr::Power { p } => OrliczFunction::power(p),
            OrliczRepr::Powerlog { p, a } => OrliczFunction::power_log(p, a),
            OrliczRepr::Tabulated { knots } => {
                OrliczFunction::tabulated(knots.into_iter().map(|[t, y]| (t, y)).collect())
            }
        }
    }
}

impl From<OrliczFunction> for OrliczRepr {
    fn from(m: OrliczFunction) -> Self {
        match m {
            OrliczFunction::Power { p } => OrliczRepr::Power { p },
            OrliczFunction::PowerLog { p, a } => OrliczRepr::Powerlog { p, a },
            OrliczFunction::Tabulated { knots } => OrliczRepr::Tabulated {
                knots: knots.into_iter().map(|(t, y)| [t, y]).collect(),
            },
        }
    }
}

/// Anything usable as the modular of a Luxemburg-type norm.
pub trait Modular: Sync {
    fn value(&self, t: f64) -> f64;
    /// Generalized inverse on `[0, ∞)`.
    fn inverse(&self, y: f64) -> f64;
    /// Closed-form `t^p`, when the modular is a pure power.
    fn power_exponent(&self) -> Option<f64> {
        None
    }
}

impl OrliczFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(LatticeError::InvalidSpec(format!("power exponent must be a finite p >= 1, got {p}")));
        }
        Ok(OrliczFunction::Power { p })
    }

    pub fn power_log(p: f64, a: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0 && a.is_finite() && a >= 0.0) {
            return Err(LatticeError::InvalidSpec(format!("powerlog needs p >= 1 and a >= 0, got p={p}, a={a}")));
        }
        let m = OrliczFunction::PowerLog { p, a };
        m.check_convex_samples()?;
        Ok(m)
    }

    /// Validates convexity and strict monotonicity of the knots, prepends the
    /// origin when missing and rescales to `M(1) = 1`.
    pub fn tabulated(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.iter().any(|(t, y)| !t.is_finite() || !y.is_finite()) {
            return Err(LatticeError::InvalidSpec("non-finite knot".into()));
        }
        if knots.first().map(|k| k.0 != 0.0).unwrap_or(true) {
            knots.insert(0, (0.0, 0.0));
        }
        if knots[0].1 != 0.0 {
            return Err(LatticeError::InvalidSpec("M(0) must be 0".into()));
        }
        if knots.len() < 2 {
            return Err(LatticeError::InvalidSpec("need at least one knot besides the origin".into()));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                return Err(LatticeError::InvalidSpec("knots must be strictly increasing in t and M(t)".into()));
            }
        }
        let slopes: Vec<f64> = knots.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
        for s in slopes.windows(2) {
            if s[1] < s[0] - 1e-10 * s[0].abs().max(1.0) {
                return Err(LatticeError::InvalidSpec("knots are not convex".into()));
            }
        }
        if knots.last().unwrap().0 < 1.0 {
            return Err(LatticeError::InvalidSpec("tabulated range must reach t = 1".into()));
        }
        let m1 = interp(&knots, 1.0);
        for k in knots.iter_mut() {
            k.1 /= m1;
        }
        Ok(OrliczFunction::Tabulated { knots })
    }

    fn check_convex_samples(&self) -> Result<()> {
        let ts = log_grid(1e-4, 1e6, 400);
        let vals: Vec<f64> = ts.iter().map(|&t| self.value(t)).collect();
        for i in 1..ts.len() - 1 {
            let s0 = (vals[i] - vals[i - 1]) / (ts[i] - ts[i - 1]);
            let s1 = (vals[i + 1] - vals[i]) / (ts[i + 1] - ts[i]);
            if s1 < s0 - 1e-10 * s0.abs().max(1.0) {
                return Err(LatticeError::InvalidSpec(format!("function is not convex near t = {}", ts[i])));
            }
        }
        Ok(())
    }

    /// Largest argument of the tabulated range (`None` for closed forms).
    pub fn max_arg(&self) -> Option<f64> {
        match self {
            OrliczFunction::Tabulated { knots } => knots.last().map(|k| k.0),
            _ => None,
        }
    }

    /// `M(t)`, extrapolating tabulated functions linearly beyond the last knot.
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            OrliczFunction::Power { p } => {
                if p == 1.0 {
                    t
                } else if p == 2.0 {
                    t * t
                } else {
                    t.powf(p)
                }
            }
            OrliczFunction::PowerLog { p, a } => {
                let base = t.powf(p);
                if t <= 1.0 || a == 0.0 {
                    base
                } else {
                    base * (1.0 + t.ln()).powf(a)
                }
            }
            OrliczFunction::Tabulated { ref knots } => interp(knots, t),
        }
    }

    /// Checked evaluation: `t` must be nonnegative and inside the tabulated range.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(LatticeError::InvalidInput(format!("argument must be a finite t >= 0, got {t}")));
        }
        if let Some(max) = self.max_arg() {
            if t > max {
                return Err(LatticeError::DomainOverflow { t, max });
            }
        }
        Ok(self.value(t))
    }

    /// `M⁻¹(y)`, checked against the tabulated range.
    pub fn inverse_checked(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) || !y.is_finite() {
            return Err(LatticeError::InvalidInput(format!("inverse needs a finite y >= 0, got {y}")));
        }
        if let OrliczFunction::Tabulated { knots } = self {
            if y > knots.last().unwrap().1 {
                return Err(LatticeError::RangeOverflow { y });
            }
        }
        Ok(self.inv(y))
    }

    fn inv(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match *self {
            OrliczFunction::Power { p } => {
                if p == 1.0 {
                    y
                } else if p == 2.0 {
                    y.sqrt()
                } else {
                    y.powf(1.0 / p)
                }
            }
            OrliczFunction::PowerLog { p, a } => {
                if y <= 1.0 || a == 0.0 {
                    y.powf(1.0 / p)
                } else {
                    // M(t) >= t^p on [1, ∞), so the root lies in [1, y^{1/p}]
                    let hi = y.powf(1.0 / p);
                    if hi <= 1.0 {
                        return 1.0;
                    }
                    log_bisect(|t| self.value(t) - y, 1.0, hi, ROOT_TOL * 1e-2, false)
                }
            }
            OrliczFunction::Tabulated { ref knots } => {
                let idx = knots.partition_point(|k| k.1 < y);
                if idx == 0 {
                    return 0.0;
                }
                let (t0, y0, t1, y1) = if idx >= knots.len() {
                    let n = knots.len();
                    (knots[n - 2].0, knots[n - 2].1, knots[n - 1].0, knots[n - 1].1)
                } else {
                    (knots[idx - 1].0, knots[idx - 1].1, knots[idx].0, knots[idx].1)
                };
                t0 + (y - y0) * (t1 - t0) / (y1 - y0)
            }
        }
    }

    /// Young conjugate `M̃(u) = sup_{t>0} (ut − M(t))`.
    pub fn young_conjugate(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return Err(LatticeError::InvalidInput(format!("conjugate needs u >= 0, got {u}")));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        if let OrliczFunction::Power { p } = *self {
            if p == 1.0 {
                return if u <= 1.0 { Ok(0.0) } else { Err(LatticeError::Divergent { u }) };
            }
            let q = p / (p - 1.0);
            return Ok((p - 1.0) * (u / p).powf(q));
        }
        legendre_sup(|t| self.value(t), u)
    }

    /// Young conjugate evaluated by the numerical route for every family.
    pub fn young_conjugate_numeric(&self, u: f64) -> Result<f64> {
        legendre_sup(|t| self.value(t), u)
    }

    /// Global exponents `(α, β)` with `M(t)/t^α` nondecreasing and
    /// `M(t)/t^β` nonincreasing on `(0, ∞)`. An upper α-estimate and a lower
    /// β-estimate with constant one then hold in `L_M`.
    pub fn index_bounds(&self) -> (f64, f64) {
        match *self {
            OrliczFunction::Power { p } => (p, p),
            OrliczFunction::PowerLog { p, a } => (p, p + a),
            OrliczFunction::Tabulated { ref knots } => {
                // local log-slope s·t/M(t) is monotone on each linear piece;
                // the linear tails push it to 1 at both ends
                let mut lo = 1.0_f64;
                let mut hi = 1.0_f64;
                for w in knots.windows(2).skip(1) {
                    let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                    for (t, y) in [w[0], w[1]] {
                        let e = s * t / y;
                        lo = lo.min(e);
                        hi = hi.max(e);
                    }
                }
                (lo, hi)
            }
        }
    }
}

impl Modular for OrliczFunction {
    fn value(&self, t: f64) -> f64 {
        OrliczFunction::value(self, t)
    }

    fn inverse(&self, y: f64) -> f64 {
        self.inv(y)
    }

    fn power_exponent(&self) -> Option<f64> {
        match *self {
            OrliczFunction::Power { p } => Some(p),
            OrliczFunction::PowerLog { p, a: 0.0 } => Some(p),
            _ => None,
        }
    }
}

fn interp(knots: &[(f64, f64)], t: f64) -> f64 {
    let idx = knots.partition_point(|k| k.0 < t);
    if idx == 0 {
        return 0.0;
    }
    let (t0, y0, t1, y1) = if idx >= knots.len() {
        let n = knots.len();
        (knots[n - 2].0, knots[n - 2].1, knots[n - 1].0, knots[n - 1].1)
    } else {
        (knots[idx - 1].0, knots[idx - 1].1, knots[idx].0, knots[idx].1)
    };
    y0 + (t - t0) * (y1 - y0) / (t1 - t0)
}

const CONJ_T_MIN: f64 = 1e-12;
const CONJ_T_MAX: f64 = 1e12;
const CONJ_CAP: f64 = 1e250;

/// `sup_{t>0} (u t − f(t))` for a convex `f` with `f(0) = 0`: a log-grid scan
/// followed by golden-section refinement of the concave objective.
pub fn legendre_sup<F: Fn(f64) -> f64>(f: F, u: f64) -> Result<f64> {
    if u == 0.0 {
        return Ok(0.0);
    }
    let grid = log_grid(CONJ_T_MIN, CONJ_T_MAX, 481);
    let g = |t: f64| u * t - f(t);
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &t) in grid.iter().enumerate() {
        let v = g(t);
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    if best == grid.len() - 1 && best_v > 0.0 {
        return Err(LatticeError::Divergent { u });
    }
    if best_v <= 0.0 {
        // maximum approached as t → 0
        return Ok(0.0);
    }
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid.len() - 1)];
    let (_, v) = golden_max(g, a, b, 1e-14 * b, 300);
    let v = v.max(best_v);
    if v > CONJ_CAP {
        return Err(LatticeError::Divergent { u });
    }
    Ok(v)
}

/// Empirical doubling constant `sup M(2u)/M(u)` over a log grid on `[1, u_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Delta2Report {
    pub constant_k: f64,
    pub range_tested: (f64, f64),
    pub grid_points: usize,
    pub cap: f64,
    pub satisfied: bool,
}

pub const DELTA2_GRID: usize = 10_000;
pub const DELTA2_CAP: f64 = 1e6;

pub fn delta2_constant(m: &OrliczFunction, u_max: f64) -> Result<Delta2Report> {
    delta2_constant_with(m, u_max, DELTA2_GRID, DELTA2_CAP)
}

pub fn delta2_constant_with(m: &OrliczFunction, u_max: f64, grid_points: usize, cap: f64) -> Result<Delta2Report> {
    if !(u_max >= 1.0) {
        return Err(LatticeError::InvalidInput(format!("u_max must be >= 1, got {u_max}")));
    }
    let mut grid = log_grid(1.0, u_max, grid_points.max(2));
    if let OrliczFunction::Tabulated { knots } = m {
        // the ratio is linear-fractional between breakpoints, so adding
        // them makes the grid supremum exact
        for &(t, _) in knots {
            for u in [t, t / 2.0] {
                if u > 1.0 && u < u_max {
                    grid.push(u);
                }
            }
        }
    }
    let k = grid
        .iter()
        .map(|&u| m.value(2.0 * u) / m.value(u))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Delta2Report {
        constant_k: k,
        range_tested: (1.0, u_max),
        grid_points: grid_points.max(2),
        cap,
        satisfied: k.is_finite() && k < cap,
    })
}

/// Result of a dilation supremum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dilation {
    pub value: f64,
    pub argmax_v: f64,
    /// The maximizer sits at the truncation point `V_max`; the true
    /// supremum may be larger.
    pub truncated: bool,
}

/// `Φ_g(u) = sup_{v ≥ max(1, 1/u)} g(vu)/g(v)` over `v ≤ v_max`.
pub fn dilation_function<G: Fn(f64) -> f64>(g: G, u: f64, v_max: f64) -> Result<Dilation> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(LatticeError::InvalidInput(format!("dilation needs u > 0, got {u}")));
    }
    let v_lo = 1.0_f64.max(1.0 / u);
    let ratio = |v: f64| g(v * u) / g(v);
    if v_lo >= v_max {
        return Ok(Dilation { value: ratio(v_lo), argmax_v: v_lo, truncated: true });
    }
    let decades = (v_max / v_lo).log10();
    let n = ((decades * 60.0).ceil() as usize).max(8) + 1;
    let grid = log_grid(v_lo, v_max, n);
    let vals: Vec<f64> = grid.iter().map(|&v| ratio(v)).collect();
    let mut best = 0;
    for i in 1..vals.len() {
        if vals[i] > vals[best] * (1.0 + 1e-13) {
            best = i;
        }
    }
    let last = grid.len() - 1;
    let truncated = best == last && vals[last] > vals[last - 1] * (1.0 + 1e-12);
    if best == 0 || best == last {
        return Ok(Dilation { value: vals[best], argmax_v: grid[best], truncated });
    }
    let (lx, v) = golden_max(|lv: f64| ratio(lv.exp()), grid[best - 1].ln(), grid[best + 1].ln(), 1e-12, 200);
    if v > vals[best] {
        Ok(Dilation { value: v, argmax_v: lx.exp(), truncated })
    } else {
        Ok(Dilation { value: vals[best], argmax_v: grid[best], truncated })
    }
}

/// The dilation function `Φ_M` of an Orlicz function, viewed as a modular
/// (it defines the sequence space `ℓ_{Φ_M}`).
pub struct DilationModular<'a> {
    pub m: &'a OrliczFunction,
    pub v_max: f64,
}

impl Modular for DilationModular<'_> {
    fn value(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        dilation_function(|t| self.m.value(t), u, self.v_max).map(|d| d.value).unwrap_or(f64::INFINITY)
    }

    fn inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let mut hi = 1.0;
        while self.value(hi) < y && hi < 1e150 {
            hi *= 2.0;
        }
        let mut lo = hi / 2.0;
        while self.value(lo) > y && lo > 1e-150 {
            lo /= 2.0;
        }
        log_bisect(|u| self.value(u) - y, lo, hi, 1e-13, false)
    }

    fn power_exponent(&self) -> Option<f64> {
        match *self.m {
            OrliczFunction::Power { p } => Some(p),
            _ => None,
        }
    }
}

/// Empirical indices `(δ, σ)` of `M` read off the dilation function `Φ_M`:
/// log-log slopes over `u ∈ [1e-4, 1e-1]` and `u ∈ [10, 1e4]`.
pub fn dilation_indices(m: &OrliczFunction) -> (f64, f64) {
    let slope_over = |a: f64, b: f64| {
        let us = log_grid(a, b, 13);
        let phis: Vec<f64> = us
            .iter()
            .map(|&u| dilation_function(|t| m.value(t), u, V_MAX).map(|d| d.value).unwrap_or(f64::NAN))
            .collect();
        crate::numeric::log_log_slope(&us, &phis)
    };
    (slope_over(1e-4, 1e-1), slope_over(10.0, 1e4))
}

/// Fundamental function of a host: the norm of a characteristic function
/// of measure `t` (function hosts) or of `n = t` unit vectors (sequence hosts).
pub fn fundamental_function(spec: &LatticeSpec, t: f64) -> Result<f64> {
    match spec {
        LatticeSpec::OrliczFn { m } => {
            if !(t > 0.0 && t <= 1.0 + 1e-12) {
                return Err(LatticeError::InvalidInput(format!("measure must lie in (0, 1], got {t}")));
            }
            Ok(1.0 / m.inv(1.0 / t))
        }
        LatticeSpec::Lorentz { p, .. } => {
            if !(t > 0.0 && t <= 1.0 + 1e-12) {
                return Err(LatticeError::InvalidInput(format!("measure must lie in (0, 1], got {t}")));
            }
            Ok(t.powf(1.0 / p))
        }
        LatticeSpec::Lp { p } => Ok(seq_count(t)?.powf(p.recip())),
        LatticeSpec::C0 => {
            seq_count(t)?;
            Ok(1.0)
        }
        LatticeSpec::OrliczSeq { psi } => Ok(1.0 / psi.inv(1.0 / seq_count(t)?)),
        LatticeSpec::WeightedLp { .. } => Err(LatticeError::InvalidSpec(
            "weighted lp is not rearrangement invariant; no fundamental function".into(),
        )),
    }
}

fn seq_count(t: f64) -> Result<f64> {
    if t >= 1.0 && t.fract() == 0.0 {
        Ok(t)
    } else {
        Err(LatticeError::InvalidInput(format!("sequence hosts take a positive integer count, got {t}")))
    }
}
