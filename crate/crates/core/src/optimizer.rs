//! Multi-start coordinate search over the open simplex
//! `{m ∈ (0,1)^n : Σ m_k ≤ 1}`.
//!
//! Points are parametrized by `n + 1` softmax logits, the last one feeding an
//! unused slack mass. Each sweep moves every logit in turn: a coarse scan
//! over offsets `±1, ±2, ±4` followed by golden-section refinement.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::numeric::{golden_max, rng_for};

pub const LOGIT_BOUND: f64 = 14.0;
pub const MEASURE_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub starts: usize,
    pub seed: u64,
    /// Stop once a full sweep improves the objective by less than this
    /// relative amount.
    pub rel_tol: f64,
    pub max_sweeps: usize,
    pub exec: Exec,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { starts: 16, seed: 0, rel_tol: 1e-6, max_sweeps: 200, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub value: f64,
    pub measures: Vec<f64>,
    /// Objective evaluations summed over all starts.
    pub evaluations: usize,
    pub best_start: usize,
}

/// Measures from logits: softmax over `n + 1` entries, floored and
/// renormalized so that the total stays at most one.
pub fn logits_to_measures(z: &[f64]) -> Vec<f64> {
    let n = z.len() - 1;
    let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|x| (x - zmax).exp()).collect();
    let s: f64 = e.iter().sum();
    let mut m: Vec<f64> = e[..n].iter().map(|x| (x / s).max(MEASURE_FLOOR)).collect();
    let total: f64 = m.iter().sum();
    if total > 1.0 {
        m.iter_mut().for_each(|x| *x /= total);
    }
    m
}

fn initial_logits(n: usize, seed: u64, start: usize) -> Vec<f64> {
    match start {
        // equal measures 1/n, no slack
        0 => {
            let mut z = vec![0.0; n + 1];
            z[n] = -LOGIT_BOUND;
            z
        }
        // equal measures 1/(n+1)
        1 => vec![0.0; n + 1],
        _ => {
            let mut rng = rng_for(seed, start as u64);
            let spread = 1.0 + (start % 4) as f64 * 1.5;
            (0..=n).map(|_| rng.gen_range(-spread..spread)).collect()
        }
    }
}

fn run_start<F>(n: usize, f: &F, sense: Sense, cfg: &SearchConfig, start: usize) -> SearchOutcome
where
    F: Fn(&[f64]) -> f64,
{
    let sign = match sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let mut evals = 0usize;
    let mut score = |z: &[f64]| {
        evals += 1;
        let v = sign * f(&logits_to_measures(z));
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut z = initial_logits(n, cfg.seed, start);
    let mut best = score(&z);
    for _ in 0..cfg.max_sweeps {
        let before = best;
        for j in 0..=n {
            let z0 = z[j];
            let mut cand_best = (z0, best);
            for d in [1.0, -1.0, 2.0, -2.0, 4.0, -4.0] {
                let c = (z0 + d).clamp(-LOGIT_BOUND, LOGIT_BOUND);
                if c == z0 {
                    continue;
                }
                z[j] = c;
                let v = score(&z);
                if v > cand_best.1 {
                    cand_best = (c, v);
                }
            }
            let centre = cand_best.0;
            let lo = (centre - 1.0).max(-LOGIT_BOUND);
            let hi = (centre + 1.0).min(LOGIT_BOUND);
            let mut zz = z.clone();
            let (x, v) = golden_max(
                |x| {
                    zz[j] = x;
                    score(&zz)
                },
                lo,
                hi,
                1e-6,
                60,
            );
            if v > cand_best.1 {
                cand_best = (x, v);
            }
            z[j] = cand_best.0;
            best = cand_best.1;
        }
        let gain = best - before;
        if gain <= cfg.rel_tol * before.abs().max(1e-300) {
            break;
        }
    }
    SearchOutcome { value: sign * best, measures: logits_to_measures(&z), evaluations: evals, best_start: start }
}

/// Optimizes `f` over the simplex from `cfg.starts` starting points and
/// keeps the best result; ties go to the lowest start index, so the outcome
/// does not depend on the execution strategy.
pub fn optimize_simplex<F>(n: usize, f: F, sense: Sense, cfg: &SearchConfig) -> SearchOutcome
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    assert!(n >= 1, "simplex dimension must be positive");
    let starts = cfg.starts.max(1);
    let outcomes = cfg.exec.map_range(starts, |s| run_start(n, &f, sense, cfg, s));
    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    let better = |a: f64, b: f64| match sense {
        Sense::Maximize => a > b,
        Sense::Minimize => a < b,
    };
    let mut best = outcomes[0].clone();
    for o in &outcomes[1..] {
        if better(o.value, best.value) {
            best = o.clone();
        }
    }
    best.evaluations = evaluations;
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measures_stay_in_simplex() {
        let m = logits_to_measures(&[14.0, 14.0, -14.0]);
        assert!(m.iter().sum::<f64>() <= 1.0 + 1e-15);
        assert!(m.iter().all(|&x| x >= MEASURE_FLOOR * 0.5));
    }

    #[test]
    fn finds_entropy_maximum() {
        // Σ -m ln m on the simplex peaks at m = 1/(n+1) including the slack;
        // without slack credit the optimum over Σ m ≤ 1 is m_k = 1/e.
        let f = |m: &[f64]| -> f64 { m.iter().map(|x| -x * x.ln()).sum() };
        let out = optimize_simplex(2, f, Sense::Maximize, &SearchConfig::default());
        let want = 2.0 / std::f64::consts::E;
        assert!((out.value - want).abs() < 1e-6, "{}", out.value);
    }

    #[test]
    fn minimizes_quadratic() {
        let f = |m: &[f64]| -> f64 { (m[0] - 0.2).powi(2) + (m[1] - 0.5).powi(2) + 1.0 };
        let out = optimize_simplex(2, f, Sense::Minimize, &SearchConfig::default());
        assert!((out.value - 1.0).abs() < 1e-8);
        assert!((out.measures[0] - 0.2).abs() < 1e-3);
    }

    #[test]
    fn schedule_independent() {
        let f = |m: &[f64]| -> f64 { m.iter().enumerate().map(|(i, x)| (i as f64 + 1.0) * x.sqrt()).sum() };
        let seq = SearchConfig { exec: Exec::Sequential, ..SearchConfig::default() };
        let par = SearchConfig { exec: Exec::Parallel, ..SearchConfig::default() };
        let a = optimize_simplex(4, f, Sense::Maximize, &seq);
        let b = optimize_simplex(4, f, Sense::Maximize, &par);
        assert_eq!(a, b);
    }
}
