use criterion::{criterion_group, criterion_main, Criterion};
use cqrate_core::codes::{average_fidelity, truncation_code};
use cqrate_core::idelta::{ChannelParam, Evaluator};
use cqrate_core::qcore::random::{random_density, rng_from_seed};
use cqrate_core::qcore::{fidelity, von_neumann_entropy};
use cqrate_core::source::{random_source, src_b};
use cqrate_core::DimsSpec;

fn dense_kernels(c: &mut Criterion) {
    let mut rng = rng_from_seed(1);
    let dims = DimsSpec::single("A", 16);
    let rho = random_density(&mut rng, dims.clone(), 16);
    let sigma = random_density(&mut rng, dims, 16);
    c.bench_function("entropy d=16", |b| b.iter(|| von_neumann_entropy(&rho)));
    c.bench_function("fidelity d=16", |b| b.iter(|| fidelity(&rho, &sigma).unwrap()));
}

fn channel_evaluator(c: &mut Criterion) {
    let mut rng = rng_from_seed(2);
    let src = random_source(&mut rng, 3, 2, 2);
    let eval = Evaluator::new(&src);
    let param = ChannelParam::random(&mut rng, 2, 4, 4).unwrap();
    c.bench_function("evaluator |X|=3 |C|=|W|=4", |b| b.iter(|| eval.evaluate_param(&param)));
}

fn block_codes(c: &mut Criterion) {
    let src = src_b();
    let code = truncation_code(&src, 2, 2).unwrap();
    c.bench_function("average fidelity n=2", |b| b.iter(|| average_fidelity(&src, &code).unwrap()));
}

criterion_group!(benches, dense_kernels, channel_evaluator, block_codes);
criterion_main!(benches);
