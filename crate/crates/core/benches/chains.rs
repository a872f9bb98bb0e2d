use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use charp_core::bfmod::rt::verify_rt_identities_with;
use charp_core::bfmod::{eigen_decompose_with, BfContext, BfElement};
use charp_core::par::Exec;
use charp_core::poly::{MvPoly, PolyRing};
use charp_core::singular::padic_chain;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn chains(c: &mut Criterion) {
    let mut g = c.benchmark_group("padic_chain");
    g.sample_size(10);
    for (p, e) in [(7u64, 2u32), (5, 3)] {
        let ring = PolyRing::new(p, &["x", "y"]).unwrap();
        let f = MvPoly::parse("x^2 + y^3 + x*y^2", &ring).unwrap();
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, format!("p={p} e={e}")), &exec, |b, &exec| {
                b.iter(|| padic_chain(black_box(&f), None, e, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn eigen(c: &mut Criterion) {
    let mut g = c.benchmark_group("eigen_decompose");
    g.sample_size(10);
    let ring = PolyRing::new(5, &["x", "y"]).unwrap();
    let ctx = BfContext::new(&MvPoly::parse("x^2 + y^3", &ring).unwrap()).unwrap();
    let w = BfElement::from_coeffs(&ctx, (0..50).map(|n| (n, MvPoly::var(&ring, (n % 2) as usize))));
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| eigen_decompose_with(black_box(&w), 2, exec).unwrap()));
    }
    g.finish();
}

fn identities(c: &mut Criterion) {
    let mut g = c.benchmark_group("rt_identities");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| verify_rt_identities_with(black_box(5), 120, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, chains, eigen, identities);
criterion_main!(benches);
