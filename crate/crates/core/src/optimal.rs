//! The optimal upper and lower sequence-space functionals of a host lattice:
//! `‖a‖_{X_U(n)}` (supremum over disjoint normalized families), `Φ_n(a)`
//! (infimum over the same families) and `‖a‖_{X_L(n)}` (decomposition
//! infimum of `Φ_n`).
//!
//! `ℓ_p`, weighted `ℓ_p`, `c₀` and Lorentz hosts have closed forms. Orlicz
//! hosts are searched over multiples of characteristic functions of disjoint
//! sets, and the results come with sandwich bounds.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{LatticeError, Result};
use crate::norms::{luxemburg_norm, luxemburg_solve, musielak_norm, orlicz_seq_norm, BetaSequence, LatticeSpec};
use crate::numeric::{bisect_increasing, lp_norm};
use crate::optimizer::{optimize_simplex, SearchConfig, Sense};
use crate::rearrangement::{SeqVector, StepFunction, MEASURE_TOL};
use crate::special::{
    delta2_constant, dilation_function, dilation_indices, DilationModular, Modular, OrliczFunction, V_MAX,
};

pub const UNIT_TOL: f64 = 1e-9;
pub const DELTA2_U_MAX: f64 = 1e4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalConfig {
    /// Dimension cap for optimization hosts.
    pub cap: usize,
    /// Dimension cap for closed-form hosts.
    pub closed_cap: usize,
    /// Largest number of parts in the decomposition search.
    pub max_parts: usize,
    pub search: SearchConfig,
    pub delta2_u_max: f64,
}

impl Default for OptimalConfig {
    fn default() -> Self {
        OptimalConfig {
            cap: 8,
            closed_cap: 10_000,
            max_parts: 3,
            search: SearchConfig::default(),
            delta2_u_max: DELTA2_U_MAX,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Exact,
    /// Equal to the reported value up to the reported equivalence constants.
    Equivalence,
    LowerBound,
    UpperBound,
    Sandwich,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// The canonical unit vectors, which attain the value.
    UnitVectors { n: usize },
    /// `χ_{F_k}/φ(m(F_k))` on disjoint sets with these measures.
    Characteristic { measures: Vec<f64>, value: f64 },
    /// Musielak weights `β_k = M⁻¹(1/m_k)`.
    Betas { betas: Vec<f64>, value: f64 },
    /// `a = Σ parts`, each part priced by `Φ_n`.
    Decomposition { parts: Vec<Vec<f64>>, part_values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalNormResult {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub bound_kind: BoundKind,
    pub witness: Option<Witness>,
    pub constants: BTreeMap<String, f64>,
    pub iterations: usize,
}

impl OptimalNormResult {
    fn exact(value: f64, witness: Option<Witness>) -> Self {
        OptimalNormResult {
            value,
            lo: value,
            hi: value,
            bound_kind: BoundKind::Exact,
            witness,
            constants: BTreeMap::new(),
            iterations: 0,
        }
    }

    /// `lo ≤ x ≤ hi` up to a relative slack.
    pub fn contains(&self, x: f64, rel: f64) -> bool {
        x >= self.lo * (1.0 - rel) - 1e-300 && x <= self.hi * (1.0 + rel)
    }
}

/// Members of a disjoint family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "members", rename_all = "snake_case")]
pub enum FamilyMembers {
    Steps(Vec<StepFunction>),
    Seqs(Vec<SeqVector>),
}

/// Pairwise disjoint elements of norm one in a host.
///
/// Step functions are placed side by side in `[0, 1]`, so disjointness is the
/// condition that their support measures add up to at most one. Sequence
/// members must have disjoint index supports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisjointFamily {
    pub host: LatticeSpec,
    pub members: FamilyMembers,
}

impl DisjointFamily {
    pub fn new(host: LatticeSpec, members: FamilyMembers) -> Result<Self> {
        let fam = DisjointFamily { host, members };
        fam.validate()?;
        Ok(fam)
    }

    /// `χ_{F_k}/φ(m_k)` for disjoint sets of measures `m_k`.
    pub fn characteristic(host: &LatticeSpec, measures: &[f64]) -> Result<Self> {
        let members = measures
            .iter()
            .map(|&m| {
                let phi = host.indicator_norm(m)?;
                StepFunction::indicator(1.0 / phi, m)
            })
            .collect::<Result<Vec<_>>>()?;
        DisjointFamily::new(host.clone(), FamilyMembers::Steps(members))
    }

    pub fn len(&self) -> usize {
        match &self.members {
            FamilyMembers::Steps(v) => v.len(),
            FamilyMembers::Seqs(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        self.host.validate()?;
        match &self.members {
            FamilyMembers::Steps(fs) => {
                if !self.host.accepts_step_functions() {
                    return Err(LatticeError::InvalidFamily(format!("{} does not host step functions", self.host.name())));
                }
                let total: f64 = fs.iter().map(|f| f.support_measure()).sum();
                if total > 1.0 + MEASURE_TOL {
                    return Err(LatticeError::InvalidFamily(format!(
                        "supports overlap: total support measure {total} exceeds 1"
                    )));
                }
                for (i, f) in fs.iter().enumerate() {
                    let nrm = self.host.step_norm(f)?;
                    if (nrm - 1.0).abs() > UNIT_TOL {
                        return Err(LatticeError::InvalidFamily(format!("member {i} has norm {nrm}")));
                    }
                }
            }
            FamilyMembers::Seqs(xs) => {
                if !self.host.accepts_sequences() {
                    return Err(LatticeError::InvalidFamily(format!("{} does not host sequences", self.host.name())));
                }
                let mut seen = std::collections::HashSet::new();
                for (i, x) in xs.iter().enumerate() {
                    for j in x.support() {
                        if !seen.insert(j) {
                            return Err(LatticeError::InvalidFamily(format!(
                                "supports overlap at index {j} (member {i})"
                            )));
                        }
                    }
                    let nrm = crate::norms::seq_norm(x, &self.host)?;
                    if (nrm - 1.0).abs() > UNIT_TOL {
                        return Err(LatticeError::InvalidFamily(format!("member {i} has norm {nrm}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// `‖Σ a_i x_i‖` in the host.
    pub fn combination_norm(&self, a: &[f64]) -> Result<f64> {
        self.validate()?;
        if a.len() != self.len() {
            return Err(LatticeError::InvalidInput(format!("{} coefficients for {} members", a.len(), self.len())));
        }
        match &self.members {
            FamilyMembers::Steps(fs) => {
                let parts: Vec<StepFunction> = fs.iter().zip(a).map(|(f, &c)| f.scaled(c)).collect();
                self.host.step_norm(&StepFunction::disjoint_sum(&parts)?)
            }
            FamilyMembers::Seqs(xs) => {
                let len = xs.iter().map(|x| x.len()).max().unwrap_or(0);
                let mut sum = vec![0.0; len];
                for (x, &c) in xs.iter().zip(a) {
                    for (s, v) in sum.iter_mut().zip(&x.entries) {
                        *s += c * v;
                    }
                }
                crate::norms::seq_norm(&SeqVector::from(sum), &self.host)
            }
        }
    }
}

fn check_dims(a: &SeqVector, host: &LatticeSpec, cfg: &OptimalConfig) -> Result<()> {
    host.validate()?;
    let cap = match host {
        LatticeSpec::OrliczFn { .. } => cfg.cap,
        LatticeSpec::OrliczSeq { .. } => {
            return Err(LatticeError::UnsupportedHost("Orlicz sequence hosts have no implemented optimal functionals".into()))
        }
        _ => cfg.closed_cap,
    };
    if a.len() > cap {
        return Err(LatticeError::CapExceeded { n: a.len(), cap });
    }
    Ok(())
}

fn nonzero_abs(a: &SeqVector) -> Vec<f64> {
    a.as_slice().iter().map(|x| x.abs()).filter(|x| *x > 0.0).collect()
}

/// Luxemburg norm of `Σ a_k χ_{F_k}/φ(m_k)` with `m(F_k) = m_k`.
pub fn characteristic_objective(a: &[f64], measures: &[f64], m: &OrliczFunction) -> f64 {
    let terms: Vec<(f64, f64)> = a
        .iter()
        .zip(measures)
        .map(|(&x, &mk)| (x.abs() * Modular::inverse(m, 1.0 / mk), mk))
        .collect();
    luxemburg_solve(&terms, m)
}

struct OrliczBounds {
    k: f64,
    alpha: f64,
    beta: f64,
}

fn orlicz_bounds(m: &OrliczFunction, cfg: &OptimalConfig) -> Result<OrliczBounds> {
    let rep = delta2_constant(m, cfg.delta2_u_max)?;
    if !rep.satisfied {
        return Err(LatticeError::Delta2Violation { k: rep.constant_k, cap: rep.cap });
    }
    let (alpha, beta) = m.index_bounds();
    Ok(OrliczBounds { k: rep.constant_k, alpha, beta })
}

fn closed_form_value(a: &SeqVector, host: &LatticeSpec, upper: bool) -> Option<OptimalNormResult> {
    let xs = a.as_slice();
    match host {
        LatticeSpec::Lp { p } | LatticeSpec::WeightedLp { p, .. } => {
            Some(OptimalNormResult::exact(lp_norm(xs, p.0), Some(Witness::UnitVectors { n: xs.len() })))
        }
        LatticeSpec::C0 => Some(OptimalNormResult::exact(lp_norm(xs, f64::INFINITY), Some(Witness::UnitVectors { n: xs.len() }))),
        LatticeSpec::Lorentz { p, q } => {
            let r = if upper { p.min(*q) } else { p.max(*q) };
            let v = lp_norm(xs, r);
            let mut res = OptimalNormResult::exact(v, None);
            res.bound_kind = BoundKind::Equivalence;
            res.constants.insert("exponent".into(), r);
            res.constants.insert("lower_equivalence".into(), 1.0);
            res.constants.insert("upper_equivalence".into(), 1.0);
            res.constants.insert("quasi_triangle".into(), host.quasi_triangle_constant());
            Some(res)
        }
        _ => None,
    }
}

/// `‖a‖_{X_U(n)}`.
pub fn xu_norm(a: &SeqVector, host: &LatticeSpec, cfg: &OptimalConfig) -> Result<OptimalNormResult> {
    check_dims(a, host, cfg)?;
    if let Some(r) = closed_form_value(a, host, true) {
        return Ok(r);
    }
    let LatticeSpec::OrliczFn { m } = host else {
        return Err(LatticeError::UnsupportedHost(host.name()));
    };
    let b = orlicz_bounds(m, cfg)?;
    let xs = nonzero_abs(a);
    if xs.is_empty() {
        return Ok(OptimalNormResult::exact(0.0, None));
    }
    let out = optimize_simplex(xs.len(), |ms| characteristic_objective(&xs, ms, m), Sense::Maximize, &cfg.search);
    let lo = out.value;
    // upper α-estimate with constant one, the reduction to characteristic
    // families and the trivial ℓ_1 bound
    let hi = lp_norm(&xs, b.alpha).min((b.k + 1.0) * lo).min(lp_norm(&xs, 1.0)).max(lo);
    let mut constants = BTreeMap::new();
    constants.insert("delta2_k".into(), b.k);
    constants.insert("lower_distortion".into(), 0.25);
    constants.insert("upper_factor".into(), b.k + 1.0);
    constants.insert("alpha".into(), b.alpha);
    Ok(OptimalNormResult {
        value: lo,
        lo,
        hi,
        bound_kind: BoundKind::Sandwich,
        witness: Some(Witness::Characteristic { measures: out.measures, value: lo }),
        constants,
        iterations: out.evaluations,
    })
}

/// `Φ_n(a)`.
pub fn phi_n(a: &SeqVector, host: &LatticeSpec, cfg: &OptimalConfig) -> Result<OptimalNormResult> {
    check_dims(a, host, cfg)?;
    if let Some(r) = closed_form_value(a, host, false) {
        return Ok(r);
    }
    let LatticeSpec::OrliczFn { m } = host else {
        return Err(LatticeError::UnsupportedHost(host.name()));
    };
    let b = orlicz_bounds(m, cfg)?;
    let xs = nonzero_abs(a);
    phi_orlicz(&xs, m, &b, &cfg.search)
}

fn phi_orlicz(xs: &[f64], m: &OrliczFunction, b: &OrliczBounds, search: &SearchConfig) -> Result<OptimalNormResult> {
    if xs.is_empty() {
        return Ok(OptimalNormResult::exact(0.0, None));
    }
    let out = optimize_simplex(xs.len(), |ms| characteristic_objective(xs, ms, m), Sense::Minimize, search);
    let hi = out.value;
    // lower β-estimate with constant one
    let lo = lp_norm(xs, f64::INFINITY).max(lp_norm(xs, b.beta)).min(hi);
    let mut constants = BTreeMap::new();
    constants.insert("beta".into(), b.beta);
    Ok(OptimalNormResult {
        value: hi,
        lo,
        hi,
        bound_kind: BoundKind::UpperBound,
        witness: Some(Witness::Characteristic { measures: out.measures, value: hi }),
        constants,
        iterations: out.evaluations,
    })
}

/// `‖a‖_{X_L(n)}`.
pub fn xl_norm(a: &SeqVector, host: &LatticeSpec, cfg: &OptimalConfig) -> Result<OptimalNormResult> {
    check_dims(a, host, cfg)?;
    if let Some(r) = closed_form_value(a, host, false) {
        return Ok(r);
    }
    let LatticeSpec::OrliczFn { m } = host else {
        return Err(LatticeError::UnsupportedHost(host.name()));
    };
    let b = orlicz_bounds(m, cfg)?;
    let xs = nonzero_abs(a);
    if xs.is_empty() {
        return Ok(OptimalNormResult::exact(0.0, None));
    }
    let mut sorted = xs.clone();
    sorted.sort_by(|x, y| y.total_cmp(x));
    let sub_search = SearchConfig { starts: (cfg.search.starts / 4).max(4), ..cfg.search.clone() };
    let mut cache: HashMap<Vec<u64>, f64> = HashMap::new();
    let mut evals = 0usize;
    let mut price = |part: &[f64]| -> Result<f64> {
        let mut key: Vec<f64> = part.iter().cloned().filter(|x| *x > 0.0).collect();
        key.sort_by(|x, y| y.total_cmp(x));
        let k: Vec<u64> = key.iter().map(|x| x.to_bits()).collect();
        if let Some(v) = cache.get(&k) {
            return Ok(*v);
        }
        let full = key.len() == sorted.len();
        let r = phi_orlicz(&key, m, &b, if full { &cfg.search } else { &sub_search })?;
        evals += r.iterations;
        cache.insert(k, r.hi);
        Ok(r.hi)
    };
    let mut candidates: Vec<Vec<Vec<f64>>> = vec![vec![sorted.clone()]];
    // contiguous blocks of the decreasing order
    let n = sorted.len();
    if cfg.max_parts >= 2 {
        for i in 1..n {
            candidates.push(vec![sorted[..i].to_vec(), sorted[i..].to_vec()]);
        }
    }
    if cfg.max_parts >= 3 {
        for i in 1..n {
            for j in i + 1..n {
                candidates.push(vec![sorted[..i].to_vec(), sorted[i..j].to_vec(), sorted[j..].to_vec()]);
            }
        }
    }
    // level splits min(a, c) + (a − c)₊
    if cfg.max_parts >= 2 {
        let mut levels: Vec<f64> = sorted[1..].to_vec();
        levels.dedup();
        for c in levels {
            let low: Vec<f64> = sorted.iter().map(|x| x.min(c)).collect();
            let high: Vec<f64> = sorted.iter().map(|x| (x - c).max(0.0)).collect();
            if high.iter().any(|x| *x > 0.0) {
                candidates.push(vec![low, high]);
            }
        }
    }
    let mut best_val = f64::INFINITY;
    let mut best_parts = Vec::new();
    let mut best_prices = Vec::new();
    for cand in candidates {
        let prices = cand.iter().map(|p| price(p)).collect::<Result<Vec<f64>>>()?;
        let total: f64 = prices.iter().sum();
        if total < best_val * (1.0 - 1e-12) {
            best_val = total;
            best_parts = cand;
            best_prices = prices;
        }
    }
    let lo = lp_norm(&xs, f64::INFINITY).max(lp_norm(&xs, b.beta)).min(best_val);
    let mut constants = BTreeMap::new();
    constants.insert("beta".into(), b.beta);
    constants.insert("max_parts".into(), cfg.max_parts as f64);
    Ok(OptimalNormResult {
        value: best_val,
        lo,
        hi: best_val,
        bound_kind: BoundKind::Sandwich,
        witness: Some(Witness::Decomposition { parts: best_parts, part_values: best_prices }),
        constants,
        iterations: evals,
    })
}

/// One inequality of the reduction report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub name: String,
    pub member: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberReduction {
    pub norm_y: f64,
    pub c: f64,
    pub norm_u: f64,
    pub r: f64,
    pub d: f64,
    pub norm_h: f64,
    pub norm_g: f64,
    pub norm_f: f64,
    /// Measure where `h_k` had to be placed on top of `g_k`.
    pub overlap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub k: f64,
    pub members: Vec<MemberReduction>,
    pub norm_sum_h: f64,
    pub norm_sum_y: f64,
    pub norm_sum_f: f64,
    pub checks: Vec<ChainCheck>,
    /// `½‖y_k‖ ≤ ‖f_k‖`, reported but not part of the verified chains.
    pub half_lower: Vec<ChainCheck>,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    /// `h_k = r_k χ_{B_k}`.
    pub hs: Vec<StepFunction>,
    /// `h_1, g_1, …, h_n, g_n`.
    pub fs: Vec<StepFunction>,
    pub report: ReductionReport,
}

const CHAIN_TOL: f64 = 1e-9;

fn chain(name: &str, member: Option<usize>, lhs: f64, rhs: f64) -> ChainCheck {
    ChainCheck { name: name.into(), member, lhs, rhs, holds: lhs <= rhs * (1.0 + CHAIN_TOL) + 1e-300 }
}

/// Replaces a disjoint family of step functions by multiples of
/// characteristic functions: `h_k` with comparable norms and a `2n`-member
/// family `{h_k, g_k}` dominating `Σ y_k` up to `K + 1`.
pub fn orlicz_disjoint_reduction(ys: &[StepFunction], m: &OrliczFunction) -> Result<Reduction> {
    orlicz_disjoint_reduction_with(ys, m, DELTA2_U_MAX)
}

pub fn orlicz_disjoint_reduction_with(ys: &[StepFunction], m: &OrliczFunction, u_max: f64) -> Result<Reduction> {
    let total: f64 = ys.iter().map(|y| y.support_measure()).sum();
    if total > 1.0 + MEASURE_TOL {
        return Err(LatticeError::InvalidFamily(format!("supports overlap: total support measure {total} exceeds 1")));
    }
    let phi = |t: f64| 1.0 / Modular::inverse(m, 1.0 / t);

    struct Built {
        rec: MemberReduction,
        h: StepFunction,
        g: StepFunction,
        f_atoms: Vec<(f64, f64)>,
        ratio: f64,
    }

    let mut built = Vec::new();
    for y in ys {
        let y = y.decreasing_rearrangement();
        if y.is_zero() {
            let rec = MemberReduction {
                norm_y: 0.0,
                c: 0.0,
                norm_u: 0.0,
                r: 0.0,
                d: 0.0,
                norm_h: 0.0,
                norm_g: 0.0,
                norm_f: 0.0,
                overlap: 0.0,
            };
            built.push(Built { rec, h: StepFunction::zero(), g: StepFunction::zero(), f_atoms: vec![], ratio: 1.0 });
            continue;
        }
        let s = y.support_measure();
        let norm_y = luxemburg_norm(&y, m);
        let c = norm_y / (2.0 * phi(s));
        let u_atoms: Vec<(f64, f64)> = y.atoms().iter().copied().filter(|a| a.0 >= c).collect();
        let mu: f64 = u_atoms.iter().map(|a| a.1).sum();
        let u = StepFunction::new(u_atoms.clone())?;
        let norm_u = luxemburg_norm(&u, m);
        let integral: f64 = u_atoms.iter().map(|&(v, w)| m.value(v) * w).sum();
        let h_of = |r: f64| m.value(r) / m.value(r / norm_u);
        // intermediate value between the extreme ratios over the values of u
        let mut r_min = u_atoms[0].0;
        let mut r_max = u_atoms[0].0;
        for &(v, _) in &u_atoms {
            if h_of(v) < h_of(r_min) {
                r_min = v;
            }
            if h_of(v) > h_of(r_max) {
                r_max = v;
            }
        }
        let r = if h_of(r_min) >= integral {
            r_min
        } else if h_of(r_max) <= integral {
            r_max
        } else {
            let t = bisect_increasing(|t| h_of(r_min + t * (r_max - r_min)) - integral, 0.0, 1.0, 1e-15);
            r_min + t * (r_max - r_min)
        };
        let d = if norm_u <= r * phi(s) { (1.0 / m.value(r / norm_u)).min(s) } else { s };
        let g_measure = (s - mu).max(0.0);
        let h = if d > 0.0 { StepFunction::indicator(r, d)? } else { StepFunction::zero() };
        let g = if g_measure > MEASURE_TOL { StepFunction::indicator(c, g_measure)? } else { StepFunction::zero() };
        // B_k fills supp u_k first and spills over the set carrying g_k
        let overlap = if g.is_zero() { 0.0 } else { (d - mu).max(0.0).min(g_measure) };
        let mut f_atoms = Vec::new();
        if d - overlap > 0.0 {
            f_atoms.push((r, d - overlap));
        }
        if overlap > 0.0 {
            f_atoms.push((r + c, overlap));
        }
        if !g.is_zero() && g_measure - overlap > 0.0 {
            f_atoms.push((c, g_measure - overlap));
        }
        let f = StepFunction::new(f_atoms.clone())?;
        let rec = MemberReduction {
            norm_y,
            c,
            norm_u,
            r,
            d,
            norm_h: luxemburg_norm(&h, m),
            norm_g: luxemburg_norm(&g, m),
            norm_f: luxemburg_norm(&f, m),
            overlap,
        };
        built.push(Built { rec, h, g, f_atoms, ratio: r / norm_u });
    }

    let u_needed = built.iter().map(|b| b.ratio).fold(1.0_f64, f64::max) * 1.01;
    let rep = delta2_constant(m, u_max.max(u_needed))?;
    if !rep.satisfied {
        return Err(LatticeError::Delta2Violation { k: rep.constant_k, cap: rep.cap });
    }
    let k = rep.constant_k;

    let sum_y = StepFunction::disjoint_sum(ys)?;
    let sum_h = StepFunction::disjoint_sum(&built.iter().map(|b| b.h.clone()).collect::<Vec<_>>())?;
    let sum_f = StepFunction::new(built.iter().flat_map(|b| b.f_atoms.iter().copied()).collect())?;
    let norm_sum_y = luxemburg_norm(&sum_y, m);
    let norm_sum_h = luxemburg_norm(&sum_h, m);
    let norm_sum_f = luxemburg_norm(&sum_f, m);

    let mut checks = Vec::new();
    let mut half_lower = Vec::new();
    for (i, b) in built.iter().enumerate() {
        let r = &b.rec;
        checks.push(chain("quarter_y_le_h", Some(i), 0.25 * r.norm_y, r.norm_h));
        checks.push(chain("h_le_y", Some(i), r.norm_h, r.norm_y));
        checks.push(chain("f_le_three_halves_y", Some(i), r.norm_f, 1.5 * r.norm_y));
        half_lower.push(chain("half_y_le_f", Some(i), 0.5 * r.norm_y, r.norm_f));
    }
    checks.push(chain("sum_h_le_sum_y", None, norm_sum_h, norm_sum_y));
    checks.push(chain("sum_y_le_k1_sum_f", None, norm_sum_y, (k + 1.0) * norm_sum_f));
    let violations = checks.iter().filter(|c| !c.holds).count();

    let hs = built.iter().map(|b| b.h.clone()).collect();
    let fs = built.iter().flat_map(|b| [b.h.clone(), b.g.clone()]).collect();
    let members = built.into_iter().map(|b| b.rec).collect();
    Ok(Reduction {
        hs,
        fs,
        report: ReductionReport { k, members, norm_sum_h, norm_sum_y, norm_sum_f, checks, half_lower, violations },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalReport {
    pub n: usize,
    pub xu: OptimalNormResult,
    /// `Φ_{M⁻¹}(n)`.
    pub dilation: f64,
    pub dilation_truncated: bool,
    /// `[Φ_{M⁻¹}(n), 2Φ_{M⁻¹}(n)]`.
    pub band: (f64, f64),
    pub overlap: bool,
    /// The characteristic-family supremum itself lies in the band.
    pub best_in_band: bool,
    pub ratio: f64,
}

/// Fundamental function of the optimal upper space at `n`, compared with
/// the dilation function of `M⁻¹`.
pub fn xu_fundamental(host: &LatticeSpec, n: usize, cfg: &OptimalConfig) -> Result<FundamentalReport> {
    let LatticeSpec::OrliczFn { m } = host else {
        return Err(LatticeError::UnsupportedHost(format!("{} is not an Orlicz function host", host.name())));
    };
    if n == 0 {
        return Err(LatticeError::InvalidInput("n must be positive".into()));
    }
    let xu = xu_norm(&SeqVector::ones(n), host, cfg)?;
    let dil = dilation_function(|y| Modular::inverse(m, y), n as f64, V_MAX)?;
    let band = (dil.value, 2.0 * dil.value);
    let tol = 0.02;
    let overlap = xu.lo <= band.1 * (1.0 + tol) && band.0 <= xu.hi * (1.0 + tol);
    let best_in_band = xu.lo >= band.0 * (1.0 - tol) && xu.lo <= band.1 * (1.0 + tol);
    Ok(FundamentalReport {
        n,
        ratio: xu.value / dil.value,
        xu,
        dilation: dil.value,
        dilation_truncated: dil.truncated,
        band,
        overlap,
        best_in_band,
    })
}

/// Supremum of Musielak-Orlicz norms over weight sequences with budget at
/// most one.
pub fn musielak_intersection_norm(a: &SeqVector, m: &OrliczFunction, cfg: &OptimalConfig) -> Result<OptimalNormResult> {
    let host = LatticeSpec::OrliczFn { m: m.clone() };
    check_dims(a, &host, cfg)?;
    let b = orlicz_bounds(m, cfg)?;
    let xs = nonzero_abs(a);
    if xs.is_empty() {
        return Ok(OptimalNormResult::exact(0.0, None));
    }
    let xv = SeqVector::from(xs.clone());
    let objective = |ms: &[f64]| -> f64 {
        match BetaSequence::from_measures(ms, m) {
            Ok(beta) => musielak_norm(&xv, &beta, m).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    };
    // an independent stream of starting points
    let search = SearchConfig { seed: cfg.search.seed ^ 0x9e37_79b9_7f4a_7c15, ..cfg.search.clone() };
    let out = optimize_simplex(xs.len(), objective, Sense::Maximize, &search);
    let lo = out.value;
    let hi = lp_norm(&xs, b.alpha).min((b.k + 1.0) * lo).min(lp_norm(&xs, 1.0)).max(lo);
    let betas = out.measures.iter().map(|&mk| Modular::inverse(m, 1.0 / mk)).collect();
    let mut constants = BTreeMap::new();
    constants.insert("delta2_k".into(), b.k);
    constants.insert("upper_factor".into(), b.k + 1.0);
    Ok(OptimalNormResult {
        value: lo,
        lo,
        hi,
        bound_kind: BoundKind::Sandwich,
        witness: Some(Witness::Betas { betas, value: lo }),
        constants,
        iterations: out.evaluations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub intersection: OptimalNormResult,
    pub xu: OptimalNormResult,
    pub relative_gap: f64,
    /// `‖a‖` in the Orlicz sequence space built on `Φ_M`.
    pub dilation_space_norm: f64,
    /// Estimated `p_M` and `‖a‖_{ℓ_{p_M}}`.
    pub p_m: f64,
    pub lp_m_norm: f64,
    pub k: f64,
    /// `sup over characteristic families ≤ 2‖a‖_{ℓ_{Φ_M}}`.
    pub upper_holds: bool,
    /// `‖a‖_{ℓ_{p_M}} ≤ (K + 1)·sup over characteristic families`.
    pub lower_holds: bool,
}

/// Compares the intersection norm with `xu_norm` and places both between
/// `ℓ_{p_M}` and `ℓ_{Φ_M}`.
pub fn musielak_embedding_chain(a: &SeqVector, m: &OrliczFunction, cfg: &OptimalConfig) -> Result<EmbeddingReport> {
    let host = LatticeSpec::OrliczFn { m: m.clone() };
    let inter = musielak_intersection_norm(a, m, cfg)?;
    let xu = xu_norm(a, &host, cfg)?;
    let k = xu.constants.get("delta2_k").copied().unwrap_or(1.0);
    let dm = DilationModular { m, v_max: V_MAX };
    let l_phi = orlicz_seq_norm(a.as_slice(), &dm);
    let p_m = match *m {
        OrliczFunction::Power { p } | OrliczFunction::PowerLog { p, .. } => p,
        OrliczFunction::Tabulated { .. } => dilation_indices(m).0.max(1.0),
    };
    let lp_m_norm = lp_norm(a.as_slice(), p_m);
    let best = xu.lo.max(inter.lo);
    let rel = (inter.value - xu.value).abs() / xu.value.max(inter.value).max(1e-300);
    Ok(EmbeddingReport {
        upper_holds: best <= 2.0 * l_phi * (1.0 + 1e-6),
        lower_holds: lp_m_norm <= (k + 1.0) * best * (1.0 + 1e-9),
        intersection: inter,
        xu,
        relative_gap: rel,
        dilation_space_norm: l_phi,
        p_m,
        lp_m_norm,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: &[f64]) -> SeqVector {
        SeqVector::new(x.to_vec()).unwrap()
    }

    fn cfg() -> OptimalConfig {
        OptimalConfig::default()
    }

    fn orl(p: f64) -> LatticeSpec {
        LatticeSpec::orlicz(OrliczFunction::power(p).unwrap())
    }

    fn pl() -> OrliczFunction {
        OrliczFunction::power_log(2.0, 1.0).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(xu_norm(&v(&[1.0, 1.0, 1.0]), &LatticeSpec::C0, &cfg()).unwrap().value, 1.0);
        assert_relative_eq!(xu_norm(&v(&[3.0, 4.0]), &LatticeSpec::lp(2.0), &cfg()).unwrap().value, 5.0);
        assert_eq!(phi_n(&v(&[1.0; 5]), &LatticeSpec::C0, &cfg()).unwrap().value, 1.0);
        assert_eq!(xl_norm(&v(&[1.0, 1.0, 1.0]), &LatticeSpec::C0, &cfg()).unwrap().value, 1.0);
        let r = xl_norm(&v(&[3.0, 4.0]), &LatticeSpec::lorentz(2.0, 3.0), &cfg()).unwrap();
        assert_relative_eq!(r.value, 91f64.powf(1.0 / 3.0), max_relative = 1e-14);
        assert_eq!(r.bound_kind, BoundKind::Equivalence);
        let e1 = v(&[1.0, 0.0, 0.0]);
        for h in [LatticeSpec::C0, LatticeSpec::lp(1.5), LatticeSpec::lorentz(3.0, 2.0), orl(2.0)] {
            assert_relative_eq!(xl_norm(&e1, &h, &cfg()).unwrap().value, 1.0, max_relative = 1e-9);
            assert_relative_eq!(xu_norm(&e1, &h, &cfg()).unwrap().value, 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn orlicz_power_case() {
        let a = v(&[1.0, 1.0]);
        let xu = xu_norm(&a, &orl(2.0), &cfg()).unwrap();
        assert_relative_eq!(xu.value, 2f64.sqrt(), max_relative = 0.02);
        assert!(xu.lo <= xu.hi);
        let ph = phi_n(&a, &orl(2.0), &cfg()).unwrap();
        assert_relative_eq!(ph.value, 2f64.sqrt(), max_relative = 0.02);
    }

    #[test]
    fn orlicz_powerlog_sandwiches() {
        let a = v(&[2.0, -1.0, 0.5]);
        let host = LatticeSpec::orlicz(pl());
        let xu = xu_norm(&a, &host, &cfg()).unwrap();
        let xl = xl_norm(&a, &host, &cfg()).unwrap();
        assert!(xu.lo <= xu.hi && xl.lo <= xl.hi);
        assert!(lp_norm(a.as_slice(), f64::INFINITY) <= xl.hi * (1.0 + 1e-12));
        assert!(xl.lo <= xu.hi && xu.hi <= lp_norm(a.as_slice(), 1.0) * (1.0 + 1e-12));
    }

    #[test]
    fn cap_and_host_errors() {
        let a = SeqVector::ones(9);
        assert!(matches!(xu_norm(&a, &orl(2.0), &cfg()), Err(LatticeError::CapExceeded { .. })));
        let psi = LatticeSpec::OrliczSeq { psi: pl() };
        assert!(matches!(xu_norm(&v(&[1.0]), &psi, &cfg()), Err(LatticeError::UnsupportedHost(_))));
    }

    #[test]
    fn family_validation() {
        let host = orl(2.0);
        let fam = DisjointFamily::characteristic(&host, &[0.25, 0.5]).unwrap();
        assert_relative_eq!(fam.combination_norm(&[1.0, 1.0]).unwrap(), characteristic_objective(&[1.0, 1.0], &[0.25, 0.5], &OrliczFunction::power(2.0).unwrap()), max_relative = 1e-12);
        assert!(matches!(DisjointFamily::characteristic(&host, &[0.6, 0.5]), Err(LatticeError::InvalidFamily(_))));
        let seqs = FamilyMembers::Seqs(vec![v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.0, 1.0])]);
        assert!(matches!(DisjointFamily::new(LatticeSpec::lp(2.0), seqs), Err(LatticeError::InvalidFamily(_))));
        let not_unit = FamilyMembers::Seqs(vec![v(&[2.0, 0.0])]);
        assert!(DisjointFamily::new(LatticeSpec::lp(2.0), not_unit).is_err());
    }

    #[test]
    fn reduction_on_characteristic_family() {
        let m = OrliczFunction::power(2.0).unwrap();
        let ys = vec![StepFunction::indicator(2.0, 0.1).unwrap(), StepFunction::indicator(0.5, 0.3).unwrap()];
        let red = orlicz_disjoint_reduction(&ys, &m).unwrap();
        assert_eq!(red.report.violations, 0);
        assert_eq!(red.fs.len(), 4);
        // no thresholding happens, so h_k reproduces y_k
        for (h, y) in red.hs.iter().zip(&ys) {
            assert_relative_eq!(luxemburg_norm(h, &m), luxemburg_norm(y, &m), max_relative = 1e-10);
        }
    }

    #[test]
    fn reduction_single_member() {
        let m = pl();
        let ys = vec![StepFunction::new(vec![(5.0, 0.05), (1.0, 0.2), (0.1, 0.5)]).unwrap()];
        let red = orlicz_disjoint_reduction(&ys, &m).unwrap();
        assert_eq!(red.report.violations, 0, "{:?}", red.report.checks);
    }

    #[test]
    fn reduction_rejects_overlap() {
        let m = pl();
        let ys = vec![StepFunction::indicator(1.0, 0.7).unwrap(), StepFunction::indicator(1.0, 0.7).unwrap()];
        assert!(matches!(orlicz_disjoint_reduction(&ys, &m), Err(LatticeError::InvalidFamily(_))));
    }

    #[test]
    fn fundamental_power_case() {
        let host = orl(2.0);
        for n in [1usize, 4] {
            let rep = xu_fundamental(&host, n, &cfg()).unwrap();
            assert!(rep.overlap && rep.best_in_band);
            assert_relative_eq!(rep.xu.value, (n as f64).sqrt(), max_relative = 0.02);
        }
        assert_eq!(xu_fundamental(&host, 1, &cfg()).unwrap().xu.value, 1.0);
    }

    #[test]
    fn musielak_examples() {
        let m2 = OrliczFunction::power(2.0).unwrap();
        let r = musielak_intersection_norm(&v(&[-3.0]), &pl(), &cfg()).unwrap();
        assert_relative_eq!(r.value, 3.0, max_relative = 1e-9);
        let r = musielak_intersection_norm(&v(&[1.0, 1.0]), &m2, &cfg()).unwrap();
        assert_relative_eq!(r.value, 2f64.sqrt(), max_relative = 0.02);
        let chain = musielak_embedding_chain(&v(&[1.0, 0.5, 0.25]), &m2, &cfg()).unwrap();
        assert!(chain.upper_holds && chain.lower_holds);
        assert!(chain.relative_gap < 0.03);
    }
}
