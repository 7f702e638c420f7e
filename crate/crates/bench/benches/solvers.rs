use cqec_core::analysis::nonmarkovianity_numeric;
use cqec_core::codes::{class_oracle, ClassGenerator};
use cqec_core::lindblad::{build_liouvillian, propagate, MarkovModel, SystemState};
use cqec_core::numerics::matrix_exponential;
use cqec_core::pmme::{pmme_3q, pmme_5q, pmme_volterra};
use cqec_core::xxbath::simulate_xx_code;
use cqec_core::{five_qubit_code, three_qubit_code, BasisConvention, DensityMatrix, MemoryKernel, PmmeModel, XXModel};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
}

fn expm(c: &mut Criterion) {
    let model = MarkovModel::for_code(three_qubit_code(), 1.0, 2.0).unwrap();
    let dense = build_liouvillian(&model, BasisConvention::PauliProduct).unwrap();
    c.bench_function("expm 64x64 three-qubit Liouvillian", |b| b.iter(|| matrix_exponential(black_box(&dense.matrix), 1.5).unwrap()));
}

fn markov(c: &mut Criterion) {
    let model = MarkovModel::for_code(five_qubit_code(), 1.0, 1.0).unwrap();
    c.bench_function("markov 5q classes, 101 times", |b| {
        b.iter(|| {
            for t in grid(2.0, 101) {
                black_box(propagate(&model, &SystemState::no_error(16), t).unwrap());
            }
        })
    });
}

fn pmme(c: &mut Criterion) {
    let ts = grid(10.0, 201);
    let k = MemoryKernel::normalized_exponential(1.0).unwrap();
    c.bench_function("pmme 3q augmented, 201 times", |b| b.iter(|| pmme_3q(&k, 1.0, 1.0, black_box(&ts)).unwrap()));
    let ts5 = grid(3.0, 201);
    c.bench_function("pmme 5q augmented, 201 times", |b| b.iter(|| pmme_5q(1.0, 1.0, 1.0, black_box(&ts5)).unwrap()));
    let model = PmmeModel::for_code(&three_qubit_code(), 1.0, 1.0, k.clone()).unwrap();
    c.bench_function("pmme 3q volterra, h = 0.01 to t = 5", |b| b.iter(|| pmme_volterra(&model, &[1.0, 0.0, 0.0, 0.0], 5.0, 0.01).unwrap()));
}

fn xx(c: &mut Criterion) {
    let model = XXModel::new(three_qubit_code(), 1.0, 1.0, 1.0).unwrap();
    let rho = DensityMatrix::basis_state(3, 0);
    let ts = grid(5.0, 51);
    let mut g = c.benchmark_group("xx");
    g.sample_size(10);
    g.bench_function("3q code + 3 bath qubits, t = 5", |b| b.iter(|| simulate_xx_code(&model, &rho, black_box(&ts)).unwrap()));
    let one = XXModel::one_qubit(1.0, 1.0, 0.5).unwrap();
    g.bench_function("measure, 20 periods", |b| b.iter(|| nonmarkovianity_numeric(&one, 25.9, 0.0065).unwrap()));
    g.finish();
}

fn classes(c: &mut Criterion) {
    let mut g = c.benchmark_group("classes");
    g.sample_size(10);
    g.bench_function("5q full-space oracle, dissipator", |b| b.iter(|| class_oracle(&five_qubit_code(), ClassGenerator::DepolarizingDissipator).unwrap()));
    g.finish();
}

criterion_group!(benches, expm, markov, pmme, xx, classes);
criterion_main!(benches);
