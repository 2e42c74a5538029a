//! Criterion benchmarks: preprocessing and per-encode throughput of the
//! pipelines on the GF(8) benchmark ensemble, plus the cycle-matrix solver.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ldpc_blocktri::codegen::{ensemble_e8, sample_matrix, sample_proper_cycle_code, EnsembleConfig};
use ldpc_blocktri::cyclegraph::{cycle_precompute, cycle_solve};
use ldpc_blocktri::pipeline::{Pipeline, PipelineKind};
use ldpc_blocktri::rng::SplitMix64;
use ldpc_blocktri::{CostProfile, SparseMatrix};

fn e8_matrix(n: usize, seed: u64) -> SparseMatrix {
    let (lambda, rho) = ensemble_e8();
    sample_matrix(&EnsembleConfig::new(n, 8, lambda, rho, seed)).expect("samplable")
}

fn random_message(len: usize, q: u64, seed: u64) -> Vec<u8> {
    let mut rng = SplitMix64::new(seed);
    (0..len).map(|_| rng.next_below(q) as u8).collect()
}

fn bench_encode(c: &mut Criterion) {
    let h = e8_matrix(1000, 11);
    let u = random_message(h.cols() - h.rows(), 8, 12);
    let mut group = c.benchmark_group("encode_e8_n1000");
    for kind in [PipelineKind::Ru, PipelineKind::Kaji, PipelineKind::BlockTri] {
        let pipe = Pipeline::build(kind, &h).expect("preprocess");
        group.bench_function(kind.as_str(), |b| {
            b.iter(|| {
                let mut profile = CostProfile::new();
                black_box(pipe.encode(black_box(&u), &mut profile))
            })
        });
    }
    group.finish();
}

fn bench_preprocess(c: &mut Criterion) {
    let h = e8_matrix(500, 13);
    let mut group = c.benchmark_group("preprocess_e8_n500");
    for kind in [PipelineKind::Ru, PipelineKind::Kaji, PipelineKind::BlockTri] {
        group.bench_function(kind.as_str(), |b| {
            b.iter(|| Pipeline::build(kind, black_box(&h)).expect("preprocess"))
        });
    }
    group.finish();
}

fn bench_cycle_solver(c: &mut Criterion) {
    let h = sample_proper_cycle_code(128, 64, 8, 17, 50).expect("samplable");
    let pipe = Pipeline::build(PipelineKind::BlockTri, &h).expect("preprocess");
    let u = random_message(64, 8, 18);
    c.bench_function("encode_cycle_code_n128", |b| {
        b.iter(|| {
            let mut profile = CostProfile::new();
            black_box(pipe.encode(black_box(&u), &mut profile))
        })
    });

    // standalone k = 64 cycle-matrix solve
    let mut rng = SplitMix64::new(19);
    let f = h.field().clone();
    let k = 64usize;
    let pre = loop {
        let entries: Vec<(usize, usize, u8)> = (0..k)
            .flat_map(|i| {
                let g = (1 + rng.next_below(7)) as u8;
                let bval = (1 + rng.next_below(7)) as u8;
                [(i, i, g), ((i + 1) % k, i, bval)]
            })
            .collect();
        let cm = SparseMatrix::from_entries(k, k, f.clone(), entries).unwrap();
        if let Ok(pre) = cycle_precompute(&cm, 0..k, 0..k) {
            break pre;
        }
    };
    let b_vec = random_message(k, 8, 20);
    c.bench_function("cycle_solve_k64", |b| {
        b.iter(|| {
            let mut profile = CostProfile::new();
            black_box(cycle_solve(&pre, black_box(&b_vec), &mut profile))
        })
    });
}

criterion_group!(benches, bench_encode, bench_preprocess, bench_cycle_solver);
criterion_main!(benches);
