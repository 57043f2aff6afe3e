use proptest::prelude::*;
use rilat::decomp::grobler_dodds;
use rilat::numeric::lp_norm;
use rilat::optimal::{phi_n, xl_norm, xu_norm, OptimalConfig};
use rilat::special::{dilation_function, Modular, V_MAX};
use rilat::{Exponent, LatticeSpec, OrliczFunction, SeqVector};

fn closed_host() -> impl Strategy<Value = LatticeSpec> {
    prop_oneof![
        (1.0f64..6.0).prop_map(LatticeSpec::lp),
        Just(LatticeSpec::lp(f64::INFINITY)),
        Just(LatticeSpec::C0),
        (1.1f64..5.0, 1.0f64..5.0).prop_map(|(p, q)| LatticeSpec::lorentz(p, q)),
    ]
}

fn vector(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 1..=max)
}

fn orlicz() -> impl Strategy<Value = OrliczFunction> {
    prop_oneof![
        (1.0f64..4.0).prop_map(|p| OrliczFunction::power(p).unwrap()),
        (1.0f64..3.0, 0.0f64..2.0).prop_map(|(p, a)| OrliczFunction::power_log(p, a).unwrap()),
    ]
}

fn val(f: fn(&SeqVector, &LatticeSpec, &OptimalConfig) -> rilat::Result<rilat::optimal::OptimalNormResult>, a: &[f64], h: &LatticeSpec) -> f64 {
    f(&SeqVector::from(a.to_vec()), h, &OptimalConfig::default()).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn embedding_chain(h in closed_host(), a in vector(8)) {
        let chain = [lp_norm(&a, f64::INFINITY), val(xl_norm, &a, &h), val(xu_norm, &a, &h), lp_norm(&a, 1.0)];
        for w in chain.windows(2) {
            prop_assert!(w[0] <= w[1] * (1.0 + 1e-10));
        }
    }

    #[test]
    fn symmetric_under_permutation(h in closed_host(), a in vector(8), rot in 0usize..8) {
        let mut b = a.clone();
        let k = rot % b.len();
        b.rotate_left(k);
        b.reverse();
        for f in [xu_norm, xl_norm, phi_n] {
            let (x, y) = (val(f, &a, &h), val(f, &b, &h));
            prop_assert!((x - y).abs() <= 1e-9 * x.max(y).max(1e-300));
        }
    }

    #[test]
    fn truncation_does_not_increase(h in closed_host(), a in vector(8)) {
        prop_assume!(a.len() >= 2);
        let cut = &a[..a.len() - 1];
        for f in [xu_norm, xl_norm, phi_n] {
            prop_assert!(val(f, cut, &h) <= val(f, &a, &h) * (1.0 + 1e-10));
        }
    }

    #[test]
    fn disjoint_blocks_on_lp(p in 1.0f64..6.0, a in vector(8), cut in 1usize..8) {
        prop_assume!(a.len() >= 2);
        let h = LatticeSpec::lp(p);
        let c = 1 + cut % (a.len() - 1);
        let (mut u, mut v) = (a.clone(), a.clone());
        u[c..].iter_mut().for_each(|x| *x = 0.0);
        v[..c].iter_mut().for_each(|x| *x = 0.0);
        let whole_u = val(xu_norm, &a, &h);
        let blocks_u = val(xu_norm, &[val(xu_norm, &u, &h), val(xu_norm, &v, &h)], &h);
        prop_assert!(whole_u <= blocks_u * (1.0 + 1e-10));
        let whole_l = val(xl_norm, &a, &h);
        let blocks_l = val(xl_norm, &[val(xl_norm, &u, &h), val(xl_norm, &v, &h)], &h);
        prop_assert!(blocks_l <= whole_l * (1.0 + 1e-10));
    }

    #[test]
    fn idempotent_on_lp(p in 1.0f64..6.0, a in vector(8)) {
        let h = LatticeSpec::lp(p);
        let again = LatticeSpec::Lp { p: grobler_dodds(&h).unwrap().delta };
        prop_assert_eq!(val(xu_norm, &a, &h), val(xu_norm, &a, &again));
        prop_assert_eq!(val(xl_norm, &a, &h), val(xl_norm, &a, &again));
    }

    #[test]
    fn orlicz_convex_and_invertible(m in orlicz(), s in 0.01f64..50.0, t in 0.01f64..50.0, lam in 0.0f64..1.0) {
        let mix = m.value(lam * s + (1.0 - lam) * t);
        prop_assert!(mix <= (lam * m.value(s) + (1.0 - lam) * m.value(t)) * (1.0 + 1e-12));
        let y = m.value(s);
        prop_assert!((Modular::inverse(&m, y) - s).abs() <= 1e-9 * s.max(1.0));
    }

    #[test]
    fn young_inequality(p in 1.2f64..4.0, t in 0.01f64..10.0, u in 0.01f64..10.0) {
        let m = OrliczFunction::power(p).unwrap();
        prop_assert!(t * u <= (m.value(t) + m.young_conjugate(u).unwrap()) * (1.0 + 1e-9));
    }

    #[test]
    fn dilation_submultiplicative(m in orlicz(), u1 in 0.1f64..30.0, u2 in 0.1f64..30.0) {
        let g = |v: f64| m.value(v);
        let d = |u: f64| dilation_function(g, u, V_MAX).unwrap();
        let (d12, d1, d2) = (d(u1 * u2), d(u1), d(u2));
        prop_assume!(!d12.truncated && !d1.truncated && !d2.truncated);
        prop_assert!(d12.value <= d1.value * d2.value * (1.0 + 1e-6));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn orlicz_sandwich_brackets_lp_bounds(m in orlicz(), a in vector(3)) {
        let h = LatticeSpec::orlicz(m);
        let r = xu_norm(&SeqVector::from(a.clone()), &h, &OptimalConfig::default()).unwrap();
        prop_assert!(r.lo <= r.hi * (1.0 + 1e-12));
        prop_assert!(r.hi <= lp_norm(&a, 1.0) * (1.0 + 1e-10));
        prop_assert!(r.lo >= lp_norm(&a, f64::INFINITY) * (1.0 - 1e-10));
    }
}

#[test]
fn weighted_lp_matches_unweighted() {
    let w = LatticeSpec::WeightedLp { p: Exponent(2.5), weights: vec![3.0, 0.1, 7.0] };
    let a = [1.0, -2.0, 0.5];
    assert_eq!(val(xu_norm, &a, &w), lp_norm(&a, 2.5));
}
