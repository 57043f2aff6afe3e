//! Distribution functions and nonincreasing rearrangements of step functions
//! on `[0, 1]` and of finite sequences.

use serde::{Deserialize, Serialize};

use crate::error::{LatticeError, Result};

pub const MEASURE_TOL: f64 = 1e-12;

/// A finitely-valued function on `[0, 1]` given by `(value, measure)` atoms.
///
/// Canonical form: atoms sorted by decreasing `|value|` (stable), zero values
/// dropped. Where the atoms sit inside `[0, 1]` is irrelevant to every
/// rearrangement-invariant quantity, so it is not recorded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepRepr", into = "StepRepr")]
pub struct StepFunction {
    atoms: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct StepRepr {
    atoms: Vec<[f64; 2]>,
}

impl TryFrom<StepRepr> for StepFunction {
    type Error = LatticeError;
    fn try_from(r: StepRepr) -> Result<Self> {
        StepFunction::new(r.atoms.into_iter().map(|[v, m]| (v, m)).collect())
    }
}

impl From<StepFunction> for StepRepr {
    fn from(f: StepFunction) -> Self {
        StepRepr { atoms: f.atoms.into_iter().map(|(v, m)| [v, m]).collect() }
    }
}

impl StepFunction {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let mut total = 0.0;
        for &(v, m) in &atoms {
            if !v.is_finite() || !m.is_finite() || m <= 0.0 {
                return Err(LatticeError::InvalidInput(format!("bad atom ({v}, {m}): need finite value and positive measure")));
            }
            total += m;
        }
        if total > 1.0 + MEASURE_TOL {
            return Err(LatticeError::InvalidInput(format!("total measure {total} exceeds 1")));
        }
        let mut atoms: Vec<(f64, f64)> = atoms.into_iter().filter(|a| a.0 != 0.0).collect();
        atoms.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
        Ok(StepFunction { atoms })
    }

    pub fn zero() -> Self {
        StepFunction { atoms: Vec::new() }
    }

    /// `c·χ_A` with `m(A) = measure`.
    pub fn indicator(c: f64, measure: f64) -> Result<Self> {
        StepFunction::new(vec![(c, measure)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Measure of the support.
    pub fn support_measure(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.atoms.first().map(|a| a.0.abs()).unwrap_or(0.0)
    }

    pub fn scaled(&self, c: f64) -> StepFunction {
        if c == 0.0 {
            return StepFunction::zero();
        }
        let mut atoms: Vec<(f64, f64)> = self.atoms.iter().map(|&(v, m)| (v * c, m)).collect();
        atoms.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
        StepFunction { atoms }
    }

    /// Sum of functions with disjoint supports (atom concatenation).
    pub fn disjoint_sum(parts: &[StepFunction]) -> Result<StepFunction> {
        StepFunction::new(parts.iter().flat_map(|p| p.atoms.iter().copied()).collect())
    }

    /// `n_f(τ) = m{|f| > τ}`.
    pub fn distribution_function(&self, tau: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0.abs() > tau).map(|a| a.1).sum()
    }

    /// `f*`: atoms of `|f|` in decreasing order, equal values merged.
    pub fn decreasing_rearrangement(&self) -> StepFunction {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.atoms.len());
        for &(v, m) in &self.atoms {
            let v = v.abs();
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += m,
                _ => out.push((v, m)),
            }
        }
        StepFunction { atoms: out }
    }

    /// Value of `f*(t)` for `t ∈ (0, 1]` (left-continuous).
    pub fn rearranged_value(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &(v, m) in &self.decreasing_rearrangement().atoms {
            acc += m;
            if t <= acc {
                return v;
            }
        }
        0.0
    }

    /// `∫_0^t f*(s) ds`.
    pub fn rearrangement_integral(&self, t: f64) -> f64 {
        let mut left = t.max(0.0);
        let mut acc = 0.0;
        for &(v, m) in &self.decreasing_rearrangement().atoms {
            if left <= 0.0 {
                break;
            }
            let take = m.min(left);
            acc += v * take;
            left -= take;
        }
        acc
    }

    /// `∫ |f|`.
    pub fn l1_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.0.abs() * a.1).sum()
    }
}

/// Agreement of the decreasing rearrangements atom by atom within `1e-12`.
pub fn equimeasurable(f: &StepFunction, g: &StepFunction) -> bool {
    let a = f.decreasing_rearrangement();
    let b = g.decreasing_rearrangement();
    a.atoms.len() == b.atoms.len()
        && a.atoms.iter().zip(&b.atoms).all(|(x, y)| {
            (x.0 - y.0).abs() <= MEASURE_TOL * x.0.abs().max(1.0) && (x.1 - y.1).abs() <= MEASURE_TOL
        })
}

/// A finite real sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeqVector {
    pub entries: Vec<f64>,
}

impl SeqVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(LatticeError::InvalidInput("sequence entries must be finite".into()));
        }
        Ok(SeqVector { entries })
    }

    pub fn ones(n: usize) -> Self {
        SeqVector { entries: vec![1.0; n] }
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        SeqVector { entries: e }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `{i : a_i ≠ 0}`.
    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(i, _)| i).collect()
    }

    /// Absolute values in decreasing order.
    pub fn rearranged(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.entries.iter().map(|x| x.abs()).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    pub fn abs(&self) -> SeqVector {
        SeqVector { entries: self.entries.iter().map(|x| x.abs()).collect() }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }
}

impl From<Vec<f64>> for SeqVector {
    fn from(entries: Vec<f64>) -> Self {
        SeqVector { entries }
    }
}
