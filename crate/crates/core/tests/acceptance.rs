//! Acceptance gate: twelve end-to-end criteria, each reported as PASS/FAIL
//! with its wall time. The test fails if any criterion fails.

use std::time::{Duration, Instant};

use rand::Rng;
use rilat::decomp::{ds_constant, fs_infimum, SamplerConfig};
use rilat::harness::{random_substochastic, run_verification_suite, to_json, RunConfig};
use rilat::interp::{cm_majorization_check, cm_orbit_operator, k_curve, k_functional, CoupleSpec, Element};
use rilat::numeric::{log_grid, log_log_slope, lp_norm, rng_for};
use rilat::optimal::{musielak_embedding_chain, orlicz_disjoint_reduction, xl_norm, xu_fundamental, xu_norm, OptimalConfig};
use rilat::{Exponent, LatticeSpec, OrliczFunction, SeqVector, StepFunction};

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

fn closed_hosts() -> Vec<LatticeSpec> {
    vec![
        LatticeSpec::lp(1.0),
        LatticeSpec::lp(1.5),
        LatticeSpec::lp(2.0),
        LatticeSpec::lp(4.0),
        LatticeSpec::lp(f64::INFINITY),
        LatticeSpec::C0,
        LatticeSpec::lorentz(2.0, 1.0),
        LatticeSpec::lorentz(2.0, 3.0),
        LatticeSpec::lorentz(3.0, 2.0),
        LatticeSpec::WeightedLp { p: Exponent(3.0), weights: vec![1.0, 0.5, 2.0, 1.5, 3.0, 0.25, 1.0, 4.0] },
    ]
}

fn holder_boundary() -> Verdict {
    let s = SamplerConfig::default();
    let inside = ds_constant(&LatticeSpec::lp(2.0), &LatticeSpec::lp(1.0), Exponent(2.0), 6, &s).unwrap();
    let unit = inside.growth.iter().map(|g| (g.value - 1.0).abs()).fold(0.0, f64::max);
    let outside = ds_constant(&LatticeSpec::lp(f64::INFINITY), &LatticeSpec::lp(1.0), Exponent(2.0), 32, &s).unwrap();
    let pts: Vec<(f64, f64)> =
        outside.growth.iter().filter(|g| g.n >= 2).map(|g| (g.n as f64, g.value)).collect();
    let (ns, vs): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
    let slope = log_log_slope(&ns, &vs);
    verdict(
        unit <= 1e-9 && (slope - 0.5).abs() <= 0.05 && ns == [2.0, 4.0, 8.0, 16.0, 32.0],
        format!("max |D - 1| inside = {unit:.2e}, slope outside = {slope:.6}"),
    )
}

fn embedding_chain() -> Verdict {
    let cfg = OptimalConfig::default();
    let mut rng = rng_for(1, 2);
    let mut worst: f64 = 0.0;
    for h in closed_hosts() {
        for _ in 0..200 {
            let n = rng.gen_range(1..=8);
            let a = random_vec(&mut rng, n);
            let v = SeqVector::from(a.clone());
            let chain = [lp_norm(&a, f64::INFINITY), xl_norm(&v, &h, &cfg).unwrap().value, xu_norm(&v, &h, &cfg).unwrap().value, lp_norm(&a, 1.0)];
            for w in chain.windows(2) {
                worst = worst.max(w[0] - w[1] * (1.0 + 1e-10));
            }
        }
    }
    verdict(worst <= 0.0, format!("largest chain excess {worst:.2e}"))
}

fn closed_forms() -> Verdict {
    let cfg = OptimalConfig::default();
    let mut rng = rng_for(1, 3);
    let mut mismatches = 0;
    for (h, p) in [(LatticeSpec::C0, f64::INFINITY), (LatticeSpec::lp(1.0), 1.0), (LatticeSpec::lp(1.5), 1.5), (LatticeSpec::lp(3.0), 3.0)] {
        for _ in 0..100 {
            let n = rng.gen_range(1..=10);
            let a = random_vec(&mut rng, n);
            let v = SeqVector::from(a.clone());
            let want = lp_norm(&a, p);
            if xu_norm(&v, &h, &cfg).unwrap().value != want || xl_norm(&v, &h, &cfg).unwrap().value != want {
                mismatches += 1;
            }
        }
    }
    verdict(mismatches == 0, format!("{mismatches} mismatches in 400 vectors"))
}

fn lorentz_identification() -> Verdict {
    let cfg = OptimalConfig::default();
    let mut rng = rng_for(1, 4);
    let mut misses = 0;
    let mut worst_const: f64 = 0.0;
    for (p, q) in [(2.0, 1.0), (2.0, 3.0), (3.0, 2.0)] {
        let h = LatticeSpec::lorentz(p, q);
        for _ in 0..50 {
            let n = rng.gen_range(1..=8);
            let a = random_vec(&mut rng, n);
            let v = SeqVector::from(a.clone());
            let (u, l) = (xu_norm(&v, &h, &cfg).unwrap(), xl_norm(&v, &h, &cfg).unwrap());
            if !u.contains(lp_norm(&a, f64::min(p, q)), 1e-12) || !l.contains(lp_norm(&a, f64::max(p, q)), 1e-12) {
                misses += 1;
            }
            for c in u.constants.values().chain(l.constants.values()) {
                worst_const = worst_const.max(*c);
            }
        }
    }
    verdict(misses == 0 && worst_const <= 10.0, format!("{misses} misses, largest constant {worst_const}"))
}

fn orlicz_power() -> Verdict {
    let cfg = OptimalConfig::default();
    let mut rng = rng_for(1, 5);
    let mut worst: f64 = 0.0;
    for p in [1.5, 2.0, 3.0] {
        let h = LatticeSpec::orlicz(OrliczFunction::power(p).unwrap());
        for n in 1..=6 {
            for _ in 0..2 {
                let a = random_vec(&mut rng, n);
                let got = xu_norm(&SeqVector::from(a.clone()), &h, &cfg).unwrap().value;
                let want = lp_norm(&a, p);
                worst = worst.max((got - want).abs() / want);
            }
        }
    }
    verdict(worst <= 0.02, format!("largest relative gap {worst:.2e}"))
}

fn random_family(rng: &mut impl Rng) -> Vec<StepFunction> {
    let members: Vec<Vec<(f64, f64)>> = (0..3)
        .map(|_| (0..rng.gen_range(1..=3)).map(|_| (rng.gen_range(0.1..5.0), rng.gen_range(0.01..1.0))).collect())
        .collect();
    let total: f64 = members.iter().flatten().map(|a| a.1).sum::<f64>() * rng.gen_range(1.0..1.5);
    members
        .into_iter()
        .map(|atoms| StepFunction::new(atoms.into_iter().map(|(v, m)| (v, m / total)).collect()).unwrap())
        .collect()
}

fn disjoint_reduction() -> Verdict {
    let mut rng = rng_for(1, 6);
    let mut violations = 0;
    for m in [OrliczFunction::power(2.0).unwrap(), OrliczFunction::power_log(2.0, 1.0).unwrap()] {
        for _ in 0..50 {
            let ys = random_family(&mut rng);
            violations += orlicz_disjoint_reduction(&ys, &m).unwrap().report.violations;
        }
    }
    verdict(violations == 0, format!("{violations} violated inequalities over 100 families"))
}

fn fundamental_equivalence() -> Verdict {
    let cfg = OptimalConfig { cap: 16, ..OptimalConfig::default() };
    let h = LatticeSpec::orlicz(OrliczFunction::power(2.0).unwrap());
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for n in [2, 4, 8, 16] {
        let r = xu_fundamental(&h, n, &cfg).unwrap();
        ok &= r.overlap && (r.dilation - (n as f64).sqrt()).abs() <= 1e-9 * r.dilation;
        worst = worst.max((r.ratio - 1.0).abs());
    }
    verdict(ok && worst <= 0.02, format!("largest |ratio - 1| {worst:.2e}"))
}

fn musielak_consistency() -> Verdict {
    let cfg = OptimalConfig::default();
    let m = OrliczFunction::power(2.0).unwrap();
    let mut rng = rng_for(1, 8);
    let mut worst: f64 = 0.0;
    let mut chain_ok = true;
    for _ in 0..50 {
        let n = rng.gen_range(1..=6);
        let r = musielak_embedding_chain(&SeqVector::from(random_vec(&mut rng, n)), &m, &cfg).unwrap();
        worst = worst.max(r.relative_gap);
        chain_ok &= r.upper_holds && r.lower_holds;
    }
    verdict(worst <= 0.03 && chain_ok, format!("largest relative gap {worst:.2e}, chain holds: {chain_ok}"))
}

fn fs_sandwich() -> Verdict {
    let s = SamplerConfig::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for q in [2.0, 3.0] {
        for p in [1.0, 1.5] {
            let sv = Exponent::from_recip(1.0 / p - 1.0 / q);
            let r = fs_infimum(&LatticeSpec::lp(q), &LatticeSpec::lp(p), sv, 16, &s).unwrap();
            ok &= r.ds <= r.value * (1.0 + 1e-6) && r.value <= r.ds * r.ds * 1.25;
            detail.push(format!("(q={q}, p={p}): D={:.6} F={:.6}", r.ds, r.value));
        }
    }
    verdict(ok, detail.join("; "))
}

fn k_functional_oracle() -> Verdict {
    let mut rng = rng_for(1, 10);
    let couple = CoupleSpec::l1_linf();
    let grid = log_grid(1e-3, 1e3, 41);
    let mut worst: f64 = 0.0;
    let mut bad_curves = 0;
    for _ in 0..100 {
        let k = rng.gen_range(1..=5);
        let atoms: Vec<(f64, f64)> = (0..k).map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(0.01..1.0))).collect();
        let total: f64 = atoms.iter().map(|a| a.1).sum::<f64>() * rng.gen_range(1.0..1.5);
        let f = StepFunction::new(atoms.into_iter().map(|(v, m)| (v, m / total)).collect()).unwrap();
        let t: f64 = 10f64.powf(rng.gen_range(-3.0..1.0));
        let x = Element::Step(f.clone());
        worst = worst.max((k_functional(t, &x, &couple).unwrap() - f.rearrangement_integral(t)).abs());
        if !f.is_zero() && !k_curve(&x, &couple, &grid, Default::default()).unwrap().violations(1e-9).is_empty() {
            bad_curves += 1;
        }
    }
    verdict(worst <= 1e-8 && bad_curves == 0, format!("largest oracle gap {worst:.2e}, {bad_curves} curves with violations"))
}

fn orbit_round_trip() -> Verdict {
    let mut rng = rng_for(1, 11);
    let mut ok = true;
    let (mut worst_norm, mut worst_res): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let x = random_vec(&mut rng, n);
        let t = random_substochastic(&mut rng, n);
        let y: Vec<f64> = t.iter().map(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
        let (sx, sy) = (SeqVector::from(x), SeqVector::from(y));
        ok &= cm_majorization_check(&sx, &sy, 1.0);
        let op = cm_orbit_operator(&sx, &sy).unwrap();
        worst_norm = worst_norm.max(op.norm_l1).max(op.norm_linf);
        worst_res = worst_res.max(op.residual);
    }
    verdict(
        ok && worst_norm <= 1.0 + 1e-10 && worst_res <= 1e-10,
        format!("largest operator norm {worst_norm:.12}, largest residual {worst_res:.2e}"),
    )
}

fn determinism() -> Verdict {
    let cfg = RunConfig { seed: 42, ..RunConfig::default() };
    let a = to_json(&run_verification_suite(&cfg, &[]).unwrap()).unwrap();
    let b = to_json(&run_verification_suite(&cfg, &[]).unwrap()).unwrap();
    verdict(a == b, format!("{} bytes", a.len()))
}

type Criterion = (&'static str, fn() -> Verdict, Option<u64>);

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("01 holder boundary", holder_boundary, Some(10)),
        ("02 embedding chain", embedding_chain, Some(5)),
        ("03 c0 and lp closed forms", closed_forms, None),
        ("04 lorentz identification", lorentz_identification, Some(30)),
        ("05 orlicz power exactness", orlicz_power, Some(60)),
        ("06 disjoint reduction", disjoint_reduction, Some(30)),
        ("07 fundamental function", fundamental_equivalence, None),
        ("08 musielak intersection", musielak_consistency, None),
        ("09 fs sandwich", fs_sandwich, None),
        ("10 k-functional oracle", k_functional_oracle, None),
        ("11 orbit round trip", orbit_round_trip, None),
        ("12 determinism", determinism, None),
    ];
    let mut failed = Vec::new();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let v = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|s| elapsed < Duration::from_secs(s));
        let ok = v.ok && in_time;
        let budget = limit.map_or(String::new(), |s| format!(" (limit {s} s)"));
        println!("{} {name} [{:.2} s{budget}] {}", if ok { "PASS" } else { "FAIL" }, elapsed.as_secs_f64(), v.detail);
        if !ok {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
