use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use csqc_core::fock::{default_cutoff, BeamSplitterSpec, FockVector};
use csqc_core::gates::{gate_branches, CsqcQubit, GateKind, ResourceFactory};
use csqc_core::noise::OpNoiseTable;
use csqc_core::pauli::{PauliFrame, Protocol, RandomNoise, EXACT_TIE};
use csqc_core::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn beam_splitter(c: &mut Criterion) {
    let mut g = c.benchmark_group("beam_splitter");
    for alpha in [1.0, 1.56, 2.0] {
        let cutoff = default_cutoff(std::f64::consts::SQRT_2 * alpha);
        let a = FockVector::coherent(C64::new(alpha, 0.0), cutoff).unwrap();
        let state = a.tensor(&a).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(alpha), &state, |b, s| {
            b.iter(|| s.apply_beam_splitter(BeamSplitterSpec::balanced(0, 1)).unwrap())
        });
    }
    g.finish();
}

fn teleported_gates(c: &mut Criterion) {
    let alpha = 1.0;
    let q = CsqcQubit::new(C64::new(0.6, 0.1), C64::new(0.3, -0.7), alpha);
    let mut g = c.benchmark_group("gate_branches");
    g.sample_size(10);
    let h = ResourceFactory::hadamard(alpha).unwrap().resource(0);
    g.bench_function("hadamard", |b| b.iter(|| gate_branches(GateKind::Hadamard, &[q], black_box(&h)).unwrap()));
    let cz = ResourceFactory::cz(alpha).unwrap().resource(0);
    g.bench_function("cz", |b| b.iter(|| gate_branches(GateKind::Cz, &[q, q], black_box(&cz)).unwrap()));
    g.finish();
}

fn pauli_frame(c: &mut Criterion) {
    let table = OpNoiseTable::from_rates(2e-4, 0.015, true).unwrap();
    let protocol = Protocol::for_table(&table, EXACT_TIE).unwrap();
    let mut noise = RandomNoise { rng: ChaCha8Rng::seed_from_u64(1) };
    c.bench_function("verified_block", |b| {
        b.iter(|| {
            let mut f = PauliFrame::new(protocol.verified_block().qubits()).unwrap();
            protocol.verified_block().propagate(&mut f, &table, &mut noise, true)
        })
    });
    c.bench_function("exrec_trial", |b| b.iter(|| protocol.exrec_trial(&table, &mut noise)));
}

criterion_group!(benches, beam_splitter, teleported_gates, pauli_frame);
criterion_main!(benches);
