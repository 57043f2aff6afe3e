use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rilat::decomp::{ds_constant, SamplerConfig};
use rilat::interp::{k_curve, CoupleSpec, Element};
use rilat::numeric::log_grid;
use rilat::optimal::{xu_norm, OptimalConfig};
use rilat::optimizer::SearchConfig;
use rilat::{Exec, Exponent, LatticeSpec, OrliczFunction, SeqVector};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn multistart(c: &mut Criterion) {
    let host = LatticeSpec::orlicz(OrliczFunction::power_log(2.0, 1.0).unwrap());
    let a = SeqVector::from(vec![1.0, -0.7, 0.4, 0.2, 0.05]);
    let mut g = c.benchmark_group("xu_norm_orlicz");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cfg = OptimalConfig { search: SearchConfig { exec, ..SearchConfig::default() }, ..OptimalConfig::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| b.iter(|| xu_norm(black_box(&a), &host, cfg).unwrap()));
    }
    g.finish();
}

fn sampled_ds(c: &mut Criterion) {
    let x = LatticeSpec::lorentz(3.0, 2.0);
    let y = LatticeSpec::orlicz(OrliczFunction::power(1.5).unwrap());
    let mut g = c.benchmark_group("ds_constant_sampled");
    g.sample_size(10);
    for (name, exec) in MODES {
        let s = SamplerConfig { exec, ..SamplerConfig::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &s, |b, s| {
            b.iter(|| ds_constant(&x, &y, Exponent(2.0), 4, s).unwrap())
        });
    }
    g.finish();
}

fn kcurve_grid(c: &mut Criterion) {
    let couple = CoupleSpec::weighted(2.0, vec![1.0, 2.0, 0.5, 1.5], 3.0, vec![0.5, 1.0, 2.0, 1.0]);
    let x = Element::Seq(SeqVector::from(vec![2.0, -1.0, 0.5, 0.25]));
    let grid = log_grid(1e-3, 1e3, 121);
    let mut g = c.benchmark_group("k_curve_weighted");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| k_curve(black_box(&x), &couple, &grid, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, multistart, sampled_ds, kcurve_grid);
criterion_main!(benches);
