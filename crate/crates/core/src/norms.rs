//! Norm evaluators for the concrete host lattices.

use serde::{Deserialize, Serialize};

use crate::error::{LatticeError, Result};
use crate::numeric::{log_bisect, lp_norm, Exponent};
use crate::rearrangement::{SeqVector, StepFunction};
use crate::special::{Modular, OrliczFunction};

/// A concrete host lattice.
///
/// `Lp` and `C0` act as `ℓ_p`/`c₀` on sequences and as `L_p[0,1]`/`L_∞[0,1]`
/// on step functions. `Lorentz` and `OrliczFn` live on `[0, 1]`,
/// `OrliczSeq` and `WeightedLp` on sequences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeSpec {
    Lp { p: Exponent },
    C0,
    Lorentz { p: f64, q: f64 },
    OrliczFn {
        #[serde(alias = "M")]
        m: OrliczFunction,
    },
    OrliczSeq { psi: OrliczFunction },
    WeightedLp { p: Exponent, weights: Vec<f64> },
}

impl LatticeSpec {
    pub fn lp(p: f64) -> Self {
        LatticeSpec::Lp { p: Exponent(p) }
    }

    pub fn lorentz(p: f64, q: f64) -> Self {
        LatticeSpec::Lorentz { p, q }
    }

    pub fn orlicz(m: OrliczFunction) -> Self {
        LatticeSpec::OrliczFn { m }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: LatticeSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LatticeError::InvalidSpec(msg));
        match self {
            LatticeSpec::Lp { p } | LatticeSpec::WeightedLp { p, .. } if !(p.0 >= 1.0) => {
                bad(format!("exponent must lie in [1, inf], got {}", p.0))
            }
            LatticeSpec::WeightedLp { weights, .. } if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) => {
                bad("weights must be finite and strictly positive".into())
            }
            LatticeSpec::Lorentz { p, q } if !(*p > 1.0 && p.is_finite() && *q >= 1.0 && q.is_finite()) => {
                bad(format!("Lorentz parameters need 1 < p < inf and 1 <= q < inf, got ({p}, {q})"))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            LatticeSpec::Lp { p } => format!("l_{p}"),
            LatticeSpec::C0 => "c0".into(),
            LatticeSpec::Lorentz { p, q } => format!("L_{{{p},{q}}}"),
            LatticeSpec::OrliczFn { .. } => "L_M".into(),
            LatticeSpec::OrliczSeq { .. } => "l_psi".into(),
            LatticeSpec::WeightedLp { p, .. } => format!("l_{p}(w)"),
        }
    }

    pub fn accepts_sequences(&self) -> bool {
        !matches!(self, LatticeSpec::Lorentz { .. } | LatticeSpec::OrliczFn { .. })
    }

    pub fn accepts_step_functions(&self) -> bool {
        matches!(
            self,
            LatticeSpec::Lorentz { .. } | LatticeSpec::OrliczFn { .. } | LatticeSpec::Lp { .. } | LatticeSpec::C0
        )
    }

    /// Norm of `c·χ_A` with `m(A) = t` (function hosts).
    pub fn indicator_norm(&self, t: f64) -> Result<f64> {
        self.step_norm(&StepFunction::indicator(1.0, t)?)
    }

    /// Norm of a step function on a function host.
    pub fn step_norm(&self, f: &StepFunction) -> Result<f64> {
        match self {
            LatticeSpec::OrliczFn { m } => Ok(luxemburg_norm(f, m)),
            LatticeSpec::Lorentz { p, q } => lorentz_norm(f, *p, *q),
            LatticeSpec::Lp { p } => Ok(step_lp_norm(f, p.0)),
            LatticeSpec::C0 => Ok(f.max_abs()),
            _ => Err(LatticeError::InvalidSpec(format!("{} is a sequence host", self.name()))),
        }
    }

    /// Quasi-triangle constant of the evaluated functional.
    pub fn quasi_triangle_constant(&self) -> f64 {
        match *self {
            LatticeSpec::Lorentz { p, q } => lorentz_quasi_constant(p, q),
            _ => 1.0,
        }
    }
}

fn step_lp_norm(f: &StepFunction, p: f64) -> f64 {
    if p.is_infinite() {
        return f.max_abs();
    }
    let m = f.max_abs();
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = f.atoms().iter().map(|&(v, w)| (v.abs() / m).powf(p) * w).sum();
    m * s.powf(1.0 / p)
}

/// `inf{λ > 0 : Σ_k w_k ψ(c_k/λ) ≤ 1}` for nonnegative `c_k` and positive
/// weights `w_k`.
///
/// With `λ_k = c_k/ψ⁻¹(1/w_k)` the root lies in `[max λ_k, Σ λ_k]`: the
/// lower end makes one term equal 1, and convexity bounds the modular by
/// `Σ λ_k/λ` at the upper end.
pub fn luxemburg_solve<M: Modular + ?Sized>(terms: &[(f64, f64)], psi: &M) -> f64 {
    let terms: Vec<(f64, f64)> = terms.iter().copied().filter(|t| t.0 != 0.0 && t.1 > 0.0).collect();
    if terms.is_empty() {
        return 0.0;
    }
    if terms.len() == 1 {
        return terms[0].0.abs() / psi.inverse(1.0 / terms[0].1);
    }
    if let Some(p) = psi.power_exponent() {
        let m = terms.iter().fold(0.0_f64, |m, t| m.max(t.0.abs()));
        let s: f64 = terms.iter().map(|&(c, w)| w * (c.abs() / m).powf(p)).sum();
        return m * s.powf(1.0 / p);
    }
    let lambdas: Vec<f64> = terms.iter().map(|&(c, w)| c.abs() / psi.inverse(1.0 / w)).collect();
    let lo = lambdas.iter().cloned().fold(0.0_f64, f64::max);
    let hi: f64 = lambdas.iter().sum();
    if hi <= lo * (1.0 + 1e-15) {
        return lo;
    }
    let modular = |lam: f64| terms.iter().map(|&(c, w)| w * psi.value(c.abs() / lam)).sum::<f64>() - 1.0;
    log_bisect(modular, lo, hi, 1e-14, true)
}

/// Luxemburg norm of a step function in `L_M[0, 1]`.
pub fn luxemburg_norm(f: &StepFunction, m: &OrliczFunction) -> f64 {
    let terms: Vec<(f64, f64)> = f.atoms().iter().map(|&(v, w)| (v.abs(), w)).collect();
    luxemburg_solve(&terms, m)
}

/// `Σ_atoms M(|v|/λ)·m`, for checking attainment.
pub fn luxemburg_modular(f: &StepFunction, m: &OrliczFunction, lambda: f64) -> f64 {
    f.atoms().iter().map(|&(v, w)| w * m.value(v.abs() / lambda)).sum()
}

/// `((q/p)∫_0^1 (t^{1/p} f*(t))^q dt/t)^{1/q}`, summed exactly over the
/// steps of `f*`.
pub fn lorentz_norm(f: &StepFunction, p: f64, q: f64) -> Result<f64> {
    LatticeSpec::Lorentz { p, q }.validate()?;
    let star = f.decreasing_rearrangement();
    let atoms = star.atoms();
    if atoms.is_empty() {
        return Ok(0.0);
    }
    let top = atoms[0].0;
    let r = q / p;
    let mut prev = 0.0_f64;
    let mut sum = 0.0;
    for &(v, m) in atoms {
        let next = prev + m;
        sum += (v / top).powf(q) * (next.powf(r) - prev.powf(r));
        prev = next;
    }
    Ok(top * sum.powf(1.0 / q))
}

/// Quasi-triangle constant of the Lorentz functional: 1 when `q ≤ p`, and
/// the Hardy constant `p/(p−1)` otherwise.
pub fn lorentz_quasi_constant(p: f64, q: f64) -> f64 {
    if q <= p {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Norm of a finite sequence on a sequence host.
pub fn seq_norm(a: &SeqVector, spec: &LatticeSpec) -> Result<f64> {
    spec.validate()?;
    match spec {
        LatticeSpec::Lp { p } => Ok(lp_norm(a.as_slice(), p.0)),
        LatticeSpec::C0 => Ok(lp_norm(a.as_slice(), f64::INFINITY)),
        LatticeSpec::WeightedLp { p, weights } => weighted_lp_norm(a, *p, weights),
        LatticeSpec::OrliczSeq { psi } => Ok(orlicz_seq_norm(a.as_slice(), psi)),
        _ => Err(LatticeError::InvalidSpec(format!("{} is a function host", spec.name()))),
    }
}

/// Luxemburg norm in the Orlicz sequence space `ℓ_ψ`.
pub fn orlicz_seq_norm<M: Modular + ?Sized>(a: &[f64], psi: &M) -> f64 {
    let terms: Vec<(f64, f64)> = a.iter().map(|&x| (x.abs(), 1.0)).collect();
    luxemburg_solve(&terms, psi)
}

pub fn weighted_lp_norm(a: &SeqVector, p: Exponent, w: &[f64]) -> Result<f64> {
    if w.len() < a.len() {
        return Err(LatticeError::InvalidInput(format!("{} weights for a vector of length {}", w.len(), a.len())));
    }
    if w.iter().any(|x| !(*x > 0.0)) {
        return Err(LatticeError::InvalidSpec("weights must be strictly positive".into()));
    }
    let scaled: Vec<f64> = a.as_slice().iter().zip(w).map(|(x, w)| x * w).collect();
    Ok(lp_norm(&scaled, p.0))
}

/// Weights `(β_k)` with budget `Σ 1/M(β_k) ≤ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaSequence {
    pub betas: Vec<f64>,
    pub budget: f64,
}

impl BetaSequence {
    pub fn new(betas: Vec<f64>, m: &OrliczFunction) -> Result<Self> {
        if betas.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
            return Err(LatticeError::InvalidInput("betas must be finite and positive".into()));
        }
        let budget: f64 = betas.iter().map(|&b| 1.0 / m.value(b)).sum();
        if budget > 1.0 + 1e-12 {
            return Err(LatticeError::InvalidInput(format!("beta budget {budget} exceeds 1")));
        }
        Ok(BetaSequence { betas, budget })
    }

    /// `β_k = M⁻¹(1/m_k)` for measures `m_k` with `Σ m_k ≤ 1`.
    pub fn from_measures(measures: &[f64], m: &OrliczFunction) -> Result<Self> {
        let betas = measures.iter().map(|&mk| m.inverse(1.0 / mk)).collect();
        let mut b = BetaSequence::new(betas, m);
        if let Err(LatticeError::InvalidInput(_)) = b {
            // tolerate round-off in the inverse at the budget boundary
            let betas: Vec<f64> = measures.iter().map(|&mk| m.inverse(1.0 / mk)).collect();
            let budget = betas.iter().map(|&x| 1.0 / m.value(x)).sum::<f64>();
            if budget <= 1.0 + 1e-9 {
                b = Ok(BetaSequence { betas, budget });
            }
        }
        b
    }
}

/// `inf{λ > 0 : Σ_k M(|a_k|β_k/λ)/M(β_k) ≤ 1}`.
pub fn musielak_norm(a: &SeqVector, beta: &BetaSequence, m: &OrliczFunction) -> Result<f64> {
    if a.len() > beta.betas.len() {
        return Err(LatticeError::InvalidInput(format!("{} betas for a vector of length {}", beta.betas.len(), a.len())));
    }
    let terms: Vec<(f64, f64)> = a
        .as_slice()
        .iter()
        .zip(&beta.betas)
        .map(|(&x, &b)| (x.abs() * b, 1.0 / m.value(b)))
        .collect();
    Ok(luxemburg_solve(&terms, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::fundamental_function;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn v(x: &[f64]) -> SeqVector {
        SeqVector::new(x.to_vec()).unwrap()
    }

    fn pl() -> OrliczFunction {
        OrliczFunction::power_log(2.0, 1.0).unwrap()
    }

    #[test]
    fn seq_examples() {
        assert_relative_eq!(seq_norm(&v(&[3.0, 4.0]), &LatticeSpec::lp(2.0)).unwrap(), 5.0, epsilon = 1e-15);
        assert_eq!(seq_norm(&v(&[1.0, 1.0, 1.0]), &LatticeSpec::lp(f64::INFINITY)).unwrap(), 1.0);
        assert_eq!(seq_norm(&v(&[1.0, -3.0]), &LatticeSpec::C0).unwrap(), 3.0);
        let psi = LatticeSpec::OrliczSeq { psi: OrliczFunction::power(2.0).unwrap() };
        assert_relative_eq!(seq_norm(&v(&[1.0, 1.0]), &psi).unwrap(), 2f64.sqrt(), max_relative = 1e-14);
        assert!(seq_norm(&v(&[1.0]), &LatticeSpec::lorentz(2.0, 1.0)).is_err());
    }

    #[test]
    fn orlicz_seq_generic_path_matches_power() {
        // a tabulated t² forces the bracketed solver
        let knots: Vec<(f64, f64)> = (0..=400).map(|i| i as f64 * 0.05).map(|t| (t, t * t)).collect();
        let tab = OrliczFunction::tabulated(knots).unwrap();
        let a = [0.3, 0.7, 1.1];
        let got = orlicz_seq_norm(&a, &tab);
        let want = lp_norm(&a, 2.0);
        assert_relative_eq!(got, want, max_relative = 1e-3);
    }

    #[test]
    fn luxemburg_examples() {
        let m2 = OrliczFunction::power(2.0).unwrap();
        let f = StepFunction::indicator(3.0, 0.25).unwrap();
        assert_relative_eq!(luxemburg_norm(&f, &m2), 1.5, max_relative = 1e-14);
        assert_eq!(luxemburg_norm(&StepFunction::zero(), &m2), 0.0);
        for t in [0.01, 0.2, 0.5, 1.0] {
            let chi = StepFunction::indicator(1.0, t).unwrap();
            let spec = LatticeSpec::orlicz(pl());
            assert_relative_eq!(luxemburg_norm(&chi, &pl()), fundamental_function(&spec, t).unwrap(), max_relative = 1e-10);
        }
    }

    #[test]
    fn luxemburg_attained_for_powerlog() {
        let f = StepFunction::new(vec![(5.0, 0.1), (-2.0, 0.3), (0.5, 0.4)]).unwrap();
        let lam = luxemburg_norm(&f, &pl());
        let s = luxemburg_modular(&f, &pl(), lam);
        assert!((s - 1.0).abs() < 1e-8, "{s}");
    }

    #[test]
    fn lorentz_examples() {
        for (p, q) in [(2.0, 1.0), (3.0, 5.0), (1.5, 1.5)] {
            let chi = StepFunction::indicator(1.0, 0.3).unwrap();
            assert_relative_eq!(lorentz_norm(&chi, p, q).unwrap(), 0.3f64.powf(1.0 / p), max_relative = 1e-14);
        }
        let f = StepFunction::new(vec![(5.0, 0.1), (-2.0, 0.3), (0.5, 0.4)]).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let m = OrliczFunction::power(p).unwrap();
            assert_relative_eq!(lorentz_norm(&f, p, p).unwrap(), luxemburg_norm(&f, &m), max_relative = 1e-9);
        }
        assert_eq!(lorentz_norm(&StepFunction::zero(), 2.0, 1.0).unwrap(), 0.0);
        assert!(lorentz_norm(&f, 1.0, 1.0).is_err());
    }

    #[test]
    fn musielak_examples() {
        let m = pl();
        let beta = BetaSequence::new(vec![3.0], &m).unwrap();
        assert_relative_eq!(musielak_norm(&v(&[-2.5]), &beta, &m).unwrap(), 2.5, max_relative = 1e-12);
        let m2 = OrliczFunction::power(2.0).unwrap();
        let beta = BetaSequence::new(vec![2.0; 4], &m2).unwrap();
        let a = v(&[1.0, 2.0, -0.5, 0.25]);
        let lam = musielak_norm(&a, &beta, &m2).unwrap();
        assert_relative_eq!(lam, lp_norm(a.as_slice(), 2.0), max_relative = 1e-12);
        assert_eq!(musielak_norm(&v(&[0.0, 0.0]), &beta, &m2).unwrap(), 0.0);
        assert!(BetaSequence::new(vec![1.0, 1.0], &m2).is_err());
    }

    #[test]
    fn weighted_examples() {
        let a = v(&[1.0, 1.0]);
        assert_eq!(weighted_lp_norm(&a, Exponent(1.0), &[1.0, 2.0]).unwrap(), 3.0);
        assert_relative_eq!(weighted_lp_norm(&a, Exponent(2.0), &[3.0, 4.0]).unwrap(), 5.0);
        let b = v(&[0.3, -2.0, 1.0]);
        assert_eq!(weighted_lp_norm(&b, Exponent(3.0), &[1.0; 3]).unwrap(), seq_norm(&b, &LatticeSpec::lp(3.0)).unwrap());
    }

    #[test]
    fn spec_json() {
        let s = LatticeSpec::from_json(r#"{"kind":"orlicz_fn","m":{"family":"power","p":2}}"#).unwrap();
        assert_eq!(s, LatticeSpec::orlicz(OrliczFunction::power(2.0).unwrap()));
        let s = LatticeSpec::from_json(r#"{"kind":"lp","p":"inf"}"#).unwrap();
        assert_eq!(s, LatticeSpec::lp(f64::INFINITY));
        assert!(LatticeSpec::from_json(r#"{"kind":"lorentz","p":1,"q":2}"#).is_err());
        assert!(LatticeSpec::from_json(r#"{"kind":"weighted_lp","p":2,"weights":[1,0]}"#).is_err());
    }

    fn step_hosts() -> Vec<LatticeSpec> {
        vec![
            LatticeSpec::orlicz(OrliczFunction::power(1.5).unwrap()),
            LatticeSpec::orlicz(pl()),
            LatticeSpec::lorentz(2.0, 1.0),
            LatticeSpec::lorentz(2.0, 3.0),
            LatticeSpec::lorentz(3.0, 2.0),
            LatticeSpec::lp(3.0),
        ]
    }

    fn seq_hosts() -> Vec<LatticeSpec> {
        vec![
            LatticeSpec::lp(1.0),
            LatticeSpec::lp(2.5),
            LatticeSpec::C0,
            LatticeSpec::OrliczSeq { psi: pl() },
            LatticeSpec::WeightedLp { p: Exponent(2.0), weights: vec![1.0, 2.0, 0.5, 3.0, 1.5] },
        ]
    }

    fn vec5() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0..5.0f64, 5)
    }

    fn measures() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.01..0.1f64, 5)
    }

    proptest! {
        #[test]
        fn seq_lattice_monotone(a in vec5(), shrink in prop::collection::vec(0.0..1.0f64, 5)) {
            let small: Vec<f64> = a.iter().zip(&shrink).map(|(x, s)| x * s).collect();
            for h in seq_hosts() {
                let big = seq_norm(&v(&a), &h).unwrap();
                let sm = seq_norm(&v(&small), &h).unwrap();
                prop_assert!(sm <= big * (1.0 + 1e-10) + 1e-12);
            }
        }

        #[test]
        fn seq_rearrangement_invariant(a in vec5(), rot in 0usize..5) {
            let mut b = a.clone();
            b.rotate_left(rot);
            b.reverse();
            for h in seq_hosts().into_iter().filter(|h| !matches!(h, LatticeSpec::WeightedLp { .. })) {
                let x = seq_norm(&v(&a), &h).unwrap();
                let y = seq_norm(&v(&b), &h).unwrap();
                prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
            }
        }

        #[test]
        fn seq_homogeneous_and_subadditive(a in vec5(), b in vec5(), c in -4.0..4.0f64) {
            for h in seq_hosts() {
                let na = seq_norm(&v(&a), &h).unwrap();
                let nb = seq_norm(&v(&b), &h).unwrap();
                let sc: Vec<f64> = a.iter().map(|x| c * x).collect();
                prop_assert!((seq_norm(&v(&sc), &h).unwrap() - c.abs() * na).abs() <= 1e-9 * na.max(1.0));
                let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                prop_assert!(seq_norm(&v(&sum), &h).unwrap() <= (na + nb) * (1.0 + 1e-9) + 1e-12);
            }
        }

        #[test]
        fn step_lattice_and_invariance(vals in vec5(), ms in measures(), shrink in prop::collection::vec(0.0..1.0f64, 5)) {
            let f = StepFunction::new(vals.iter().cloned().zip(ms.iter().cloned()).collect()).unwrap();
            let g = StepFunction::new(vals.iter().zip(&shrink).map(|(x, s)| x * s).zip(ms.iter().cloned()).collect()).unwrap();
            let mut perm: Vec<(f64, f64)> = vals.iter().cloned().zip(ms.iter().cloned()).collect();
            perm.reverse();
            let fp = StepFunction::new(perm.iter().map(|&(x, m)| (-x, m)).collect()).unwrap();
            for h in step_hosts() {
                let nf = h.step_norm(&f).unwrap();
                prop_assert!(h.step_norm(&g).unwrap() <= nf * (1.0 + 1e-10) + 1e-12);
                prop_assert!((h.step_norm(&fp).unwrap() - nf).abs() <= 1e-12 * nf.max(1.0));
            }
        }

        #[test]
        fn step_quasi_triangle(a in vec5(), b in vec5(), ms in measures(), c in -3.0..3.0f64) {
            // both functions live on the same five sets, so their sum does too
            let f = StepFunction::new(a.iter().cloned().zip(ms.iter().cloned()).collect()).unwrap();
            let g = StepFunction::new(b.iter().cloned().zip(ms.iter().cloned()).collect()).unwrap();
            let s = StepFunction::new(a.iter().zip(&b).map(|(x, y)| x + y).zip(ms.iter().cloned()).collect()).unwrap();
            for h in step_hosts() {
                let (nf, ng) = (h.step_norm(&f).unwrap(), h.step_norm(&g).unwrap());
                let k = h.quasi_triangle_constant();
                prop_assert!(h.step_norm(&s).unwrap() <= k * (nf + ng) * (1.0 + 1e-9) + 1e-12);
                prop_assert!((h.step_norm(&f.scaled(c)).unwrap() - c.abs() * nf).abs() <= 1e-9 * nf.max(1.0));
            }
        }

        #[test]
        fn luxemburg_attainment(vals in vec5(), ms in measures()) {
            let f = StepFunction::new(vals.iter().cloned().zip(ms.iter().cloned()).collect()).unwrap();
            prop_assume!(!f.is_zero());
            for m in [pl(), OrliczFunction::power(3.0).unwrap(), OrliczFunction::power_log(1.2, 0.5).unwrap()] {
                let lam = luxemburg_norm(&f, &m);
                let s = luxemburg_modular(&f, &m, lam);
                prop_assert!((s - 1.0).abs() <= 1e-8, "modular {}", s);
            }
        }
    }
}
