//! Upper and lower estimate constants, relative decomposability constants,
//! Grobler-Dodds indices, the `F_s` infimum and the multiplicator inclusion.
//!
//! Hosts whose disjoint families are lattice-isometric to `ℓ_r` (`Lp`, `C0`,
//! `WeightedLp`) are handled in closed form. Every other host is probed over
//! a fixed catalogue of disjoint families with coefficient ascent on top, so
//! the reported constants are lower bounds at the stated family size.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LatticeError, Result};
use crate::exec::Exec;
use crate::norms::{seq_norm, LatticeSpec};
use crate::numeric::{golden_max, log_grid, log_log_slope, lp_norm, rng_for, Exponent};
use crate::optimal::{xl_norm, xu_norm, DisjointFamily, FamilyMembers, OptimalConfig};
use crate::rearrangement::{SeqVector, StepFunction};
use crate::special::{dilation_indices, OrliczFunction};

/// Growth slopes above this count as growth.
pub const GROWTH_SLOPE: f64 = 0.02;
pub const FS_SLACK: f64 = 1.25;
pub const FEASIBILITY_C: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    Growing { exponent: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub n: usize,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    EqualSplit,
    Geometric,
    SeparatedScale,
    SingleSpike,
    Random,
}

/// Family catalogue and coefficient search used for non-closed-form hosts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub random_families: usize,
    pub sweeps: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { random_families: 2, sweeps: 2, seed: 0, exec: Exec::default() }
    }
}

impl SamplerConfig {
    fn catalogue(&self) -> Vec<(Shape, u64)> {
        let mut v = vec![
            (Shape::EqualSplit, 0),
            (Shape::Geometric, 0),
            (Shape::SeparatedScale, 0),
            (Shape::SingleSpike, 0),
        ];
        v.extend((0..self.random_families as u64).map(|k| (Shape::Random, k)));
        v
    }

    fn inventory(&self) -> Vec<String> {
        self.catalogue()
            .iter()
            .map(|(s, k)| match s {
                Shape::Random => format!("random#{k}"),
                other => serde_json::to_value(other).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub p: Exponent,
    pub direction: Direction,
    pub constant: f64,
    pub n_max: usize,
    pub growth: Vec<GrowthPoint>,
    pub slope: f64,
    pub verdict: Verdict,
    pub method: Method,
    pub sampler: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompWitness {
    pub x: DisjointFamily,
    pub y: DisjointFamily,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub ratio: f64,
}

impl DecompWitness {
    /// Recomputes the ratio from the stored families and coefficients.
    pub fn recompute(&self, s: Exponent) -> Result<f64> {
        ds_ratio(&self.x, &self.y, &self.a, &self.b, s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompReport {
    pub s: Exponent,
    pub empirical_ds: f64,
    pub n_max: usize,
    pub witness: DecompWitness,
    pub growth: Vec<GrowthPoint>,
    pub slope: f64,
    pub verdict: Verdict,
    pub method: Method,
    pub sampler: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexSource {
    AnalyticTable,
    EmpiricalSlope,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub delta: Exponent,
    pub sigma: Exponent,
    pub source: IndexSource,
    /// Set for the conventional `c₀` entry.
    pub flagged: bool,
    /// Largest `p` with `M(uv) ≤ C·u^p·M(v)` on the feasibility grid.
    pub p_m_feasible: Option<f64>,
    /// Excess of the feasibility estimate over `p_M` caused by the finite
    /// grid: `ln C / ln(1/u_min)`.
    pub feasibility_bias: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FsPoint {
    pub p: Exponent,
    pub q: Exponent,
    pub lower_x: f64,
    pub upper_y: f64,
    pub product: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FsReport {
    pub s: Exponent,
    pub value: f64,
    pub argmin: Option<(Exponent, Exponent)>,
    pub grid: Vec<FsPoint>,
    pub ds: f64,
    pub n_max: usize,
    pub delta_y: Exponent,
    pub sigma_x: Exponent,
    pub hypothesis_violation: bool,
    pub s_max_infinite: bool,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultSample {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub pessimistic: f64,
    pub optimistic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultReport {
    pub s: Exponent,
    pub ds: f64,
    pub samples: Vec<MultSample>,
    /// `sup ‖ab‖_{Y_U}^{hi} / (‖b‖_s ‖a‖_{X_L}^{lo})`.
    pub worst_pessimistic: f64,
    /// `sup ‖ab‖_{Y_U}^{lo} / (‖b‖_s ‖a‖_{X_L}^{hi})`.
    pub worst_optimistic: f64,
    pub slack: f64,
    pub holds: bool,
}

/// The `r` with disjoint families of `host` isometric to those of `ℓ_r`.
fn ell_exponent(host: &LatticeSpec) -> Option<f64> {
    match host {
        LatticeSpec::Lp { p } | LatticeSpec::WeightedLp { p, .. } => Some(p.0),
        LatticeSpec::C0 => Some(f64::INFINITY),
        _ => None,
    }
}

fn inv(r: f64) -> f64 {
    Exponent(r).recip()
}

fn sizes_up_to(n_max: usize) -> Vec<usize> {
    let mut v = vec![1];
    let mut n = 2;
    while n < n_max {
        v.push(n);
        n *= 2;
    }
    if n_max > 1 {
        v.push(n_max);
    }
    v
}

fn growth_slope(growth: &[GrowthPoint]) -> f64 {
    let pts: Vec<&GrowthPoint> = growth.iter().filter(|g| g.n >= 2).collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let xs: Vec<f64> = pts.iter().map(|g| g.n as f64).collect();
    let ys: Vec<f64> = pts.iter().map(|g| g.value).collect();
    log_log_slope(&xs, &ys)
}

fn verdict(slope: f64) -> Verdict {
    if slope > GROWTH_SLOPE {
        Verdict::Growing { exponent: slope }
    } else {
        Verdict::Bounded
    }
}

/// Replace the running values by their running maximum.
fn monotone(growth: &mut [GrowthPoint]) {
    let mut best = f64::NEG_INFINITY;
    for g in growth.iter_mut() {
        best = best.max(g.value);
        g.value = best;
    }
}

/// Member measures of a step family of `n` members.
fn shape_measures(shape: Shape, n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let nf = n as f64;
    match shape {
        Shape::EqualSplit => vec![1.0 / nf; n],
        Shape::Geometric => (0..n).map(|i| 0.5_f64.powi(i as i32 + 1)).collect(),
        Shape::SeparatedScale => (0..n).map(|i| 0.5 * 8.0_f64.powi(-(i as i32))).collect(),
        Shape::SingleSpike => {
            if n == 1 {
                vec![1e-4]
            } else {
                let mut v = vec![(1.0 - 1e-4) / (nf - 1.0); n];
                v[0] = 1e-4;
                v
            }
        }
        Shape::Random => {
            let w: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.05..1.0)).collect();
            let s: f64 = w.iter().sum();
            w[..n].iter().map(|x| x / s).collect()
        }
    }
}

/// Disjoint unit-norm family of `n` members of the given shape.
pub fn sample_family(host: &LatticeSpec, shape: Shape, n: usize, seed: u64, stream: u64) -> Result<DisjointFamily> {
    let host = match host {
        LatticeSpec::WeightedLp { p, .. } => LatticeSpec::Lp { p: *p },
        h => h.clone(),
    };
    let mut rng = rng_for(seed, stream);
    if host.accepts_step_functions() {
        let measures = shape_measures(shape, n, &mut rng);
        let members = measures
            .iter()
            .map(|&m| {
                let raw = if shape == Shape::Random {
                    let k = rng.gen_range(1..=3usize);
                    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..1.0)).collect();
                    let ws: f64 = w.iter().sum();
                    StepFunction::new(w.iter().map(|x| (rng.gen_range(1.0..10.0), m * x / ws)).collect())?
                } else {
                    StepFunction::indicator(1.0, m)?
                };
                let nrm = host.step_norm(&raw)?;
                Ok(raw.scaled(1.0 / nrm))
            })
            .collect::<Result<Vec<_>>>()?;
        return DisjointFamily::new(host, FamilyMembers::Steps(members));
    }
    let lens: Vec<usize> = match shape {
        Shape::EqualSplit => vec![3; n],
        Shape::Geometric => (0..n).map(|i| 1 << i.min(3)).collect(),
        Shape::SeparatedScale => (0..n).map(|i| 1 + 3 * i.min(4)).collect(),
        Shape::SingleSpike => (0..n).map(|i| if i == 0 { 1 } else { 4 }).collect(),
        Shape::Random => (0..n).map(|_| rng.gen_range(1..=4)).collect(),
    };
    let total: usize = lens.iter().sum();
    let mut start = 0;
    let mut members = Vec::with_capacity(n);
    for &len in &lens {
        let mut v = vec![0.0; total];
        for x in &mut v[start..start + len] {
            *x = if shape == Shape::Random { rng.gen_range(1.0..10.0) } else { 1.0 };
        }
        let sv = SeqVector::from(v);
        let nrm = seq_norm(&sv, &host)?;
        members.push(SeqVector::from(sv.entries.iter().map(|x| x / nrm).collect::<Vec<_>>()));
        start += len;
    }
    DisjointFamily::new(host, FamilyMembers::Seqs(members))
}

/// `‖Σ c_i x_i‖` without re-validating the family.
fn sum_norm(fam: &DisjointFamily, c: &[f64]) -> f64 {
    let r = match &fam.members {
        FamilyMembers::Steps(fs) => {
            let parts: Vec<StepFunction> = fs.iter().zip(c).map(|(f, &k)| f.scaled(k)).collect();
            StepFunction::disjoint_sum(&parts).and_then(|f| fam.host.step_norm(&f))
        }
        FamilyMembers::Seqs(xs) => {
            let len = xs.iter().map(|x| x.len()).max().unwrap_or(0);
            let mut sum = vec![0.0; len];
            for (x, &k) in xs.iter().zip(c) {
                for (s, v) in sum.iter_mut().zip(&x.entries) {
                    *s += k * v;
                }
            }
            seq_norm(&SeqVector::from(sum), &fam.host)
        }
    };
    r.unwrap_or(f64::NAN)
}

/// Coordinate ascent on the logarithms of positive coefficients.
fn ascend<F: Fn(&[f64]) -> f64>(start: Vec<f64>, f: F, sweeps: usize) -> (Vec<f64>, f64) {
    let mut x = start;
    let mut best = f(&x);
    for _ in 0..sweeps {
        let before = best;
        for j in 0..x.len() {
            let l0 = x[j].ln();
            let mut y = x.clone();
            let (l, v) = golden_max(
                |l| {
                    y[j] = l.exp();
                    let r = f(&y);
                    if r.is_nan() {
                        f64::NEG_INFINITY
                    } else {
                        r
                    }
                },
                l0 - 4.0,
                l0 + 4.0,
                1e-5,
                48,
            );
            if v > best {
                best = v;
                x[j] = l.exp();
            }
        }
        if best <= before * (1.0 + 1e-9) {
            break;
        }
    }
    (x, best)
}

fn coefficient_starts(n: usize) -> Vec<Vec<f64>> {
    vec![vec![1.0; n], (0..n).map(|i| 0.5_f64.powf(i as f64 / 2.0)).collect()]
}

fn estimate_ratio(fam: &DisjointFamily, c: &[f64], p: f64, dir: Direction) -> f64 {
    let num = lp_norm(c, p);
    let den = sum_norm(fam, c);
    match dir {
        Direction::Upper => den / num,
        Direction::Lower => num / den,
    }
}

fn check_exponent(p: Exponent) -> Result<()> {
    if !(p.0 >= 1.0) {
        return Err(LatticeError::InvalidInput(format!("exponent must lie in [1, inf], got {}", p.0)));
    }
    Ok(())
}

/// Empirical `M^[p]` (upper) or `M_[p]` (lower) of `host` over families of
/// up to `n_max` members.
pub fn estimate_constant(
    host: &LatticeSpec,
    p: Exponent,
    direction: Direction,
    n_max: usize,
    sampler: &SamplerConfig,
) -> Result<EstimateReport> {
    host.validate()?;
    check_exponent(p)?;
    let n_max = n_max.max(1);
    let sizes = sizes_up_to(n_max);
    if let Some(r) = ell_exponent(host) {
        let e = match direction {
            Direction::Upper => inv(r) - p.recip(),
            Direction::Lower => p.recip() - inv(r),
        }
        .max(0.0);
        let growth: Vec<GrowthPoint> = sizes.iter().map(|&n| GrowthPoint { n, value: (n as f64).powf(e) }).collect();
        let slope = growth_slope(&growth);
        return Ok(EstimateReport {
            p,
            direction,
            constant: growth.last().map(|g| g.value).unwrap_or(1.0),
            n_max,
            growth,
            slope,
            verdict: verdict(slope),
            method: Method::ClosedForm,
            sampler: Vec::new(),
        });
    }
    let cat = sampler.catalogue();
    let jobs: Vec<(usize, Shape, u64)> =
        sizes.iter().flat_map(|&n| cat.iter().map(move |&(s, k)| (n, s, k))).collect();
    let vals = sampler.exec.map(&jobs, |&(n, shape, k)| -> Result<f64> {
        let fam = sample_family(host, shape, n, sampler.seed, (n as u64) << 8 | k)?;
        let mut best = f64::NEG_INFINITY;
        for c0 in coefficient_starts(n) {
            let (_, v) = ascend(c0, |c| estimate_ratio(&fam, c, p.0, direction), sampler.sweeps);
            best = best.max(v);
        }
        Ok(best)
    });
    let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
    let mut growth = Vec::with_capacity(sizes.len());
    for (i, &n) in sizes.iter().enumerate() {
        let v = vals[i * cat.len()..(i + 1) * cat.len()].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        growth.push(GrowthPoint { n, value: v });
    }
    monotone(&mut growth);
    let slope = growth_slope(&growth);
    Ok(EstimateReport {
        p,
        direction,
        constant: growth.last().map(|g| g.value).unwrap_or(1.0),
        n_max,
        growth,
        slope,
        verdict: verdict(slope),
        method: Method::Sampled,
        sampler: sampler.inventory(),
    })
}

/// `‖Σ a_i b_i y_i‖_Y / (‖b‖_s ‖Σ a_i x_i‖_X)`.
pub fn ds_ratio(x: &DisjointFamily, y: &DisjointFamily, a: &[f64], b: &[f64], s: Exponent) -> Result<f64> {
    if x.len() != y.len() || a.len() != x.len() || b.len() != x.len() {
        return Err(LatticeError::InvalidInput("families and coefficient vectors must have equal length".into()));
    }
    let ab: Vec<f64> = a.iter().zip(b).map(|(u, v)| u * v).collect();
    let den = lp_norm(b, s.0) * x.combination_norm(a)?;
    if den == 0.0 {
        return Err(LatticeError::ZeroDenominator);
    }
    Ok(y.combination_norm(&ab)? / den)
}

fn unit_family(host: &LatticeSpec, n: usize) -> Result<DisjointFamily> {
    let members = (0..n)
        .map(|i| {
            let mut v = vec![0.0; n];
            v[i] = match host {
                LatticeSpec::WeightedLp { weights, .. } => 1.0 / weights[i],
                _ => 1.0,
            };
            SeqVector::from(v)
        })
        .collect();
    DisjointFamily::new(host.clone(), FamilyMembers::Seqs(members))
}

fn seq_host(host: &LatticeSpec, n: usize) -> LatticeSpec {
    match host {
        LatticeSpec::WeightedLp { p, weights } if weights.len() < n => LatticeSpec::Lp { p: *p },
        h => h.clone(),
    }
}

/// Empirical relative `s`-decomposability constant `D_s(X, Y)` over
/// families of up to `n_max` members.
pub fn ds_constant(x: &LatticeSpec, y: &LatticeSpec, s: Exponent, n_max: usize, sampler: &SamplerConfig) -> Result<DecompReport> {
    x.validate()?;
    y.validate()?;
    check_exponent(s)?;
    let n_max = n_max.max(1);
    let sizes = sizes_up_to(n_max);
    if let (Some(q), Some(p)) = (ell_exponent(x), ell_exponent(y)) {
        // Hölder: the uniform family is extremal
        let e = (inv(p) - inv(q) - s.recip()).max(0.0);
        let growth: Vec<GrowthPoint> = sizes.iter().map(|&n| GrowthPoint { n, value: (n as f64).powf(e) }).collect();
        let slope = growth_slope(&growth);
        let nw = if e > 0.0 { n_max } else { 1 };
        let (xh, yh) = (seq_host(x, nw), seq_host(y, nw));
        let xf = unit_family(&xh, nw)?;
        let yf = unit_family(&yh, nw)?;
        let ones = vec![1.0; nw];
        let ratio = ds_ratio(&xf, &yf, &ones, &ones, s)?;
        return Ok(DecompReport {
            s,
            empirical_ds: growth.last().map(|g| g.value).unwrap_or(1.0),
            n_max,
            witness: DecompWitness { x: xf, y: yf, a: ones.clone(), b: ones, ratio },
            growth,
            slope,
            verdict: verdict(slope),
            method: Method::ClosedForm,
            sampler: Vec::new(),
        });
    }
    let cat = sampler.catalogue();
    let pairs: Vec<((Shape, u64), (Shape, u64))> =
        cat.iter().flat_map(|&cx| cat.iter().map(move |&cy| (cx, cy))).collect();
    let jobs: Vec<(usize, usize)> = sizes.iter().flat_map(|&n| (0..pairs.len()).map(move |j| (n, j))).collect();
    let outs = sampler.exec.map(&jobs, |&(n, j)| -> Result<DecompWitness> {
        let ((sx, kx), (sy, ky)) = pairs[j];
        let xf = sample_family(x, sx, n, sampler.seed, (n as u64) << 8 | kx)?;
        let yf = sample_family(y, sy, n, sampler.seed ^ 0x5bd1e995, (n as u64) << 8 | ky)?;
        let obj = |ab: &[f64]| -> f64 {
            let (a, b) = ab.split_at(n);
            let prod: Vec<f64> = a.iter().zip(b).map(|(u, v)| u * v).collect();
            sum_norm(&yf, &prod) / (lp_norm(b, s.0) * sum_norm(&xf, a))
        };
        let mut best: (Vec<f64>, f64) = (vec![1.0; 2 * n], f64::NEG_INFINITY);
        for c0 in coefficient_starts(n) {
            let start: Vec<f64> = c0.iter().chain(vec![1.0; n].iter()).copied().collect();
            let r = ascend(start, obj, sampler.sweeps);
            if r.1 > best.1 {
                best = r;
            }
        }
        let (a, b) = best.0.split_at(n);
        let (a, b) = (a.to_vec(), b.to_vec());
        let ratio = ds_ratio(&xf, &yf, &a, &b, s)?;
        Ok(DecompWitness { x: xf, y: yf, a, b, ratio })
    });
    let outs: Vec<DecompWitness> = outs.into_iter().collect::<Result<_>>()?;
    let mut growth = Vec::with_capacity(sizes.len());
    let mut witness: Option<DecompWitness> = None;
    for (i, &n) in sizes.iter().enumerate() {
        let mut v = f64::NEG_INFINITY;
        for w in &outs[i * pairs.len()..(i + 1) * pairs.len()] {
            v = v.max(w.ratio);
            if witness.as_ref().is_none_or(|b| w.ratio > b.ratio) {
                witness = Some(w.clone());
            }
        }
        growth.push(GrowthPoint { n, value: v });
    }
    monotone(&mut growth);
    let slope = growth_slope(&growth);
    let witness = witness.ok_or_else(|| LatticeError::InvalidInput("empty family catalogue".into()))?;
    Ok(DecompReport {
        s,
        empirical_ds: witness.ratio,
        n_max,
        witness,
        growth,
        slope,
        verdict: verdict(slope),
        method: Method::Sampled,
        sampler: sampler.inventory(),
    })
}

/// Largest `p ≤ 16` with `M(uv) ≤ C·u^p·M(v)` for `u ∈ [u_min, 1]`,
/// `uv ∈ [1, 10³]`, bisected to `1e-3`.
pub fn p_m_feasibility(m: &OrliczFunction, c: f64, u_min: f64) -> f64 {
    let us = log_grid(u_min, 1.0, 49);
    let mut pts = Vec::new();
    for &u in &us {
        for w in log_grid(1.0, 1e3, 13) {
            let v = w / u;
            pts.push((u.ln(), m.value(w).ln() - m.value(v).ln()));
        }
    }
    let lc = c.ln();
    let feasible = |p: f64| pts.iter().all(|&(lu, lr)| lr - p * lu <= lc + 1e-12);
    let (mut lo, mut hi) = (1.0, 16.0);
    if !feasible(lo) {
        return 1.0;
    }
    if feasible(hi) {
        return hi;
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Indices of an Orlicz sequence space, read off `ψ` near zero.
fn seq_orlicz_indices(psi: &OrliczFunction) -> (f64, f64) {
    let us = log_grid(1e-4, 1e-1, 13);
    let ratios = |u: f64| -> (f64, f64) {
        let vs = log_grid(1e-6, 1.0, 121);
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for v in vs {
            let r = psi.value(u * v) / psi.value(v);
            hi = hi.max(r);
            lo = lo.min(r);
        }
        (hi, lo)
    };
    let rs: Vec<(f64, f64)> = us.iter().map(|&u| ratios(u)).collect();
    let sup: Vec<f64> = rs.iter().map(|r| r.0).collect();
    let inf: Vec<f64> = rs.iter().map(|r| r.1).collect();
    (log_log_slope(&us, &sup), log_log_slope(&us, &inf))
}

/// Grobler-Dodds indices `(δ, σ)`.
pub fn grobler_dodds(host: &LatticeSpec) -> Result<IndexReport> {
    host.validate()?;
    let table = |d: f64, s: f64, flagged: bool| IndexReport {
        delta: Exponent(d),
        sigma: Exponent(s),
        source: IndexSource::AnalyticTable,
        flagged,
        p_m_feasible: None,
        feasibility_bias: None,
    };
    Ok(match host {
        LatticeSpec::Lp { p } | LatticeSpec::WeightedLp { p, .. } => table(p.0, p.0, false),
        LatticeSpec::C0 => table(f64::INFINITY, f64::INFINITY, true),
        LatticeSpec::Lorentz { p, q } => table(p.min(*q), p.max(*q), false),
        LatticeSpec::OrliczFn { m } => {
            let (d, s) = dilation_indices(m);
            let d = d.max(1.0);
            let u_min = 1e-12;
            let feas = p_m_feasibility(m, FEASIBILITY_C, u_min);
            IndexReport {
                delta: Exponent(d),
                sigma: Exponent(s.max(d)),
                source: IndexSource::EmpiricalSlope,
                flagged: false,
                p_m_feasible: Some(feas),
                feasibility_bias: Some(FEASIBILITY_C.ln() / (1.0 / u_min).ln()),
            }
        }
        LatticeSpec::OrliczSeq { psi } => {
            let (d, s) = seq_orlicz_indices(psi);
            let d = d.max(1.0);
            IndexReport {
                delta: Exponent(d),
                sigma: Exponent(s.max(d)),
                source: IndexSource::EmpiricalSlope,
                flagged: false,
                p_m_feasible: None,
                feasibility_bias: None,
            }
        }
    })
}

/// Grid of lower-estimate exponents `q ∈ [σ, 16] ∪ {∞}`.
fn q_grid(sigma: f64) -> Vec<f64> {
    let mut qs = Vec::new();
    if sigma.is_finite() && sigma < 16.0 {
        qs.push(sigma);
        qs.extend(log_grid(sigma, 16.0, 13).into_iter().skip(1));
    }
    qs.push(f64::INFINITY);
    qs
}

/// `F_s(X, Y) = inf M_[q](X)·M^[p](Y)` along `1/p = 1/q + 1/s`,
/// `1 ≤ p ≤ q`, with the sandwich `D_s ≤ F_s ≤ D_s²` checked against the
/// empirical `D_s` at the same family size.
pub fn fs_infimum(x: &LatticeSpec, y: &LatticeSpec, s: Exponent, n_max: usize, sampler: &SamplerConfig) -> Result<FsReport> {
    check_exponent(s)?;
    let sx = grobler_dodds(x)?.sigma;
    let dy = grobler_dodds(y)?.delta;
    let mut grid = Vec::new();
    for q in q_grid(sx.0) {
        let rp = inv(q) + s.recip();
        if rp > 1.0 + 1e-12 {
            continue;
        }
        let p = if rp <= 0.0 { f64::INFINITY } else { (1.0 / rp).max(1.0) };
        if p > q {
            continue;
        }
        let lx = estimate_constant(x, Exponent(q), Direction::Lower, n_max, sampler)?.constant;
        let uy = estimate_constant(y, Exponent(p), Direction::Upper, n_max, sampler)?.constant;
        grid.push(FsPoint { p: Exponent(p), q: Exponent(q), lower_x: lx, upper_y: uy, product: lx * uy });
    }
    let best = grid.iter().min_by(|a, b| a.product.total_cmp(&b.product));
    let value = best.map_or(f64::INFINITY, |b| b.product);
    let argmin = best.map(|b| (b.p, b.q));
    let ds = ds_constant(x, y, s, n_max, sampler)?;
    let closed = ds.method == Method::ClosedForm && ell_exponent(x).is_some();
    let lower_tol = if closed { 1e-6 } else { FS_SLACK - 1.0 };
    Ok(FsReport {
        s,
        value,
        argmin,
        grid,
        ds: ds.empirical_ds,
        n_max,
        delta_y: dy,
        sigma_x: sx,
        hypothesis_violation: sx.0 < dy.0,
        s_max_infinite: sx.0 <= dy.0,
        lower_holds: ds.empirical_ds <= value * (1.0 + lower_tol),
        upper_holds: value <= ds.empirical_ds * ds.empirical_ds * FS_SLACK,
        slack: FS_SLACK,
    })
}

/// Checks `‖ab‖_{Y_U} ≤ D_s·‖b‖_s·‖a‖_{X_L}` on random pairs, with `D_s`
/// the empirical constant at the largest sampled length.
pub fn multiplicator_check(
    x: &LatticeSpec,
    y: &LatticeSpec,
    s: Exponent,
    samples: usize,
    n_max: usize,
    cfg: &OptimalConfig,
    sampler: &SamplerConfig,
) -> Result<MultReport> {
    check_exponent(s)?;
    let n_max = n_max.max(1);
    let ds = ds_constant(x, y, s, n_max, sampler)?.empirical_ds;
    let mut pairs = Vec::with_capacity(samples);
    let mut rng = rng_for(sampler.seed, 0x6d756c74);
    for _ in 0..samples {
        let n = rng.gen_range(1..=n_max);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        pairs.push((a, b));
    }
    let outs = sampler.exec.map(&pairs, |(a, b)| -> Result<MultSample> {
        let ab: Vec<f64> = a.iter().zip(b).map(|(u, v)| u * v).collect();
        let yu = xu_norm(&SeqVector::from(ab), y, cfg)?;
        let xl = xl_norm(&SeqVector::from(a.clone()), x, cfg)?;
        let bs = lp_norm(b, s.0);
        Ok(MultSample { a: a.clone(), b: b.clone(), pessimistic: yu.hi / (bs * xl.lo), optimistic: yu.lo / (bs * xl.hi) })
    });
    let samples: Vec<MultSample> = outs.into_iter().collect::<Result<_>>()?;
    let worst_pessimistic = samples.iter().map(|m| m.pessimistic).fold(0.0, f64::max);
    let worst_optimistic = samples.iter().map(|m| m.optimistic).fold(0.0, f64::max);
    let slack = FS_SLACK - 1.0;
    Ok(MultReport { s, ds, samples, worst_pessimistic, worst_optimistic, slack, holds: worst_pessimistic <= ds * (1.0 + slack) })
}

/// `n,value,log_n,log_value` rows.
pub fn growth_csv(growth: &[GrowthPoint]) -> String {
    let mut out = String::from("n,value,log_n,log_value\n");
    for g in growth {
        out.push_str(&format!(
            "{},{},{},{}\n",
            g.n,
            crate::numeric::sig12(g.value),
            crate::numeric::sig12((g.n as f64).ln()),
            crate::numeric::sig12(g.value.ln())
        ));
    }
    out
}
