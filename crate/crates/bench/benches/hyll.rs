use criterion::{black_box, criterion_group, criterion_main, Criterion};

use hyll_core::corpus::{process, FOCUS_GOALS};
use hyll_core::focusing::{prove_unfocused, SearchBudget};
use hyll_core::gen::PropGen;
use hyll_core::kernel::{check_proof, identity_expand, CheckOptions};
use hyll_core::rng::Rng;
use hyll_core::simulator::{simulate, SimConfig};
use hyll_core::spi::certify;
use hyll_core::worlds::{DomainId, WorldExpr};

fn identity(c: &mut Criterion) {
    let mut rng = Rng::new(1);
    let gen = PropGen::new(DomainId::Rates, 5);
    let props: Vec<_> = (0..50).map(|_| gen.prop(&mut rng)).collect();
    let w = WorldExpr::param("w");
    c.bench_function("identity_expand/50 props depth 5", |b| {
        b.iter(|| {
            for a in &props {
                let p = identity_expand(a, &w, DomainId::Rates);
                black_box(check_proof(&p, &CheckOptions::new(DomainId::Rates)).ok);
            }
        })
    });
}

fn search(c: &mut Criterion) {
    let goals: Vec<_> = FOCUS_GOALS.iter().map(|g| (g.domain, g.parse())).collect();
    let budget = SearchBudget::with_decisions(8);
    c.bench_function("search/focus corpus", |b| {
        b.iter(|| {
            for (d, s) in &goals {
                black_box(prove_unfocused(s, *d, &budget).1.is_some());
            }
        })
    });
}

fn spi(c: &mut Criterion) {
    let f = process("two-party");
    let run = f.run.clone().unwrap();
    let cfg = SimConfig { seed: 3, max_steps: 4, ..SimConfig::default() };
    let trace = simulate(&f.env, &f.rates, &run, &cfg).unwrap().trace;
    c.bench_function("spi/certify two-party", |b| b.iter(|| black_box(certify(&f.env, &f.rates, &trace).unwrap().report.ok)));

    let f = process("producer-consumer");
    let run = f.run.clone().unwrap();
    c.bench_function("spi/simulate producer-consumer 100 steps", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            let cfg = SimConfig { seed, max_steps: 100, ..SimConfig::default() };
            black_box(simulate(&f.env, &f.rates, &run, &cfg).unwrap().trace.len())
        })
    });
}

criterion_group!(benches, identity, search, spi);
criterion_main!(benches);
