//! Acceptance suite: every release criterion, one test per criterion, each
//! printing a PASS line with its measured numbers. Soft targets (magnitude
//! closeness to the published averages) are printed but only the hard
//! orderings are asserted.
//!
//! Run with `cargo test -p ldpc-blocktri-cli --test acceptance -- --nocapture`.

use std::sync::Arc;
use std::time::Instant;

use ldpc_blocktri::blocktri::{preprocess, BlockKind, SolverMode};
use ldpc_blocktri::codegen::{
    sample_proper_cycle_code, DegreeDistribution, EnsembleConfig, sample_matrix,
};
use ldpc_blocktri::cyclegraph::{cycle_costs, cycle_precompute, cycle_solve, CycleError};
use ldpc_blocktri::galois::build_field;
use ldpc_blocktri::oracle::dense_solve;
use ldpc_blocktri::atm::{approximate_triangulate, ru_precompute};
use ldpc_blocktri::pipeline::PipelineKind;
use ldpc_blocktri::rng::{derive_seed, SplitMix64};
use ldpc_blocktri::{CostProfile, FieldTable, SparseMatrix};
use ldpc_blocktri_cli::{run_experiment, EnsembleSpec, ExperimentConfig};

fn field(p: u32) -> Arc<FieldTable> {
    Arc::new(build_field(p).unwrap())
}

/// Mixed-degree test distribution (rate 3/5) used where the criterion does
/// not pin an ensemble; well-defined for both binary and non-binary fields.
fn generic_ensemble(n: usize, q: u16, seed: u64) -> SparseMatrix {
    let lambda = DegreeDistribution::new(vec![(2, 0.5), (3, 0.5)]).unwrap();
    let rho = DegreeDistribution::new(vec![(6, 1.0)]).unwrap();
    let mut cfg = EnsembleConfig::new(n, q, lambda, rho, seed);
    cfg.max_attempts = 500;
    sample_matrix(&cfg).expect("generic ensemble is samplable")
}

fn random_vector(len: usize, q: u64, rng: &mut SplitMix64) -> Vec<u8> {
    (0..len).map(|_| rng.next_below(q) as u8).collect()
}

#[test]
fn criterion_1_parity_correctness() {
    let started = Instant::now();
    let mut checked = 0u64;
    for q in [2u16, 8] {
        for n in [64usize, 200] {
            for trial in 0..100u64 {
                let seed = derive_seed(0xC1, (q as u64) << 32 | (n as u64) << 16 | trial);
                let h = generic_ensemble(n, q, seed);
                let mut rng = SplitMix64::new(derive_seed(seed, 1));
                let u = random_vector(h.cols() - h.rows(), q as u64, &mut rng);
                let form = preprocess(&h, SolverMode::Ru).expect("full-rank input");
                let x = form.encode_to_original(&u, &mut CostProfile::new());
                let syndrome = h.matvec(&x);
                assert!(
                    syndrome.iter().all(|&s| s == 0),
                    "criterion 1 (parity correctness): FAIL at q={q} n={n} trial={trial}"
                );
                checked += 1;
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 30.0, "criterion 1 exceeded 30 s: {secs:.1} s");
    println!(
        "criterion 1 (parity correctness): PASS - {checked} encodings, zero failures, {secs:.1} s"
    );
}

#[test]
fn criterion_2_cycle_solver_exactness() {
    let mut rng = SplitMix64::new(0xC2);
    let mut instances = Vec::new();
    for p in [2u32, 3, 4] {
        for k in 2..=64usize {
            instances.push((p, k));
        }
    }
    while instances.len() < 200 {
        let p = [2u32, 3, 4][rng.next_below(3) as usize];
        let k = 2 + rng.next_below(63) as usize;
        instances.push((p, k));
    }
    for &(p, k) in &instances {
        let f = field(p);
        let q = f.q() as u64;
        // draw until the cycle matrix is nonsingular
        let pre = loop {
            let entries: Vec<(usize, usize, u8)> = (0..k)
                .flat_map(|i| {
                    let g = (1 + rng.next_below(q - 1)) as u8;
                    let b = (1 + rng.next_below(q - 1)) as u8;
                    [(i, i, g), ((i + 1) % k, i, b)]
                })
                .collect();
            let c = SparseMatrix::from_entries(k, k, Arc::clone(&f), entries).unwrap();
            match cycle_precompute(&c, 0..k, 0..k) {
                Ok(pre) => break (pre, c),
                Err(CycleError::SingularCycle) => continue,
                Err(e) => panic!("criterion 2: unexpected {e}"),
            }
        };
        let (pre, c) = pre;
        let b = random_vector(k, q, &mut rng);
        let mut profile = CostProfile::new();
        let w = cycle_solve(&pre, &b, &mut profile);
        assert_eq!(
            w,
            dense_solve(&c, &b).unwrap(),
            "criterion 2: solution mismatch at q=2^{p} k={k}"
        );
        assert_eq!(
            (profile.mul_count, profile.add_count),
            cycle_costs(k),
            "criterion 2: count mismatch at q=2^{p} k={k}"
        );
    }
    println!(
        "criterion 2 (cycle-solver exactness): PASS - {} instances, counts exactly (3k-1, 2k-2)",
        instances.len()
    );
}

#[test]
fn criterion_3_ru_cost_formula_fidelity() {
    let f = field(3);
    let mut rng = SplitMix64::new(0xC3);
    let mut built = 0;
    while built < 50 {
        let rows = 10 + rng.next_below(31) as usize;
        let cols = rows + 1 + rng.next_below(rows as u64) as usize;
        let density = 0.08 + rng.next_f64() * 0.2;
        let mut entries = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if rng.next_f64() < density {
                    entries.push((r, c, (1 + rng.next_below(7)) as u8));
                }
            }
        }
        let m = SparseMatrix::from_entries(rows, cols, Arc::clone(&f), entries).unwrap();
        if m.gauss_rank() < rows {
            continue;
        }
        let skel = approximate_triangulate(&m, 0..rows, 0..cols).unwrap();
        let form = ru_precompute(&skel).unwrap();
        let predicted = form.ru_costs();
        let b = random_vector(rows, 8, &mut rng);
        let mut profile = CostProfile::new();
        let p = form.ru_solve(&b, &mut profile);
        assert_eq!(form.a().matvec(&p), b, "criterion 3: solve incorrect");
        assert_eq!(
            (profile.mul_count, profile.add_count),
            predicted,
            "criterion 3: measured profile differs from closed form"
        );
        built += 1;
    }
    println!("criterion 3 (RU cost-formula fidelity): PASS - 50 forms, measured = (f_m, f_a) exactly");
}

#[test]
fn criterion_4_block_structure_on_proper_cycle_codes() {
    let mut rng = SplitMix64::new(0xC4);
    for trial in 0..50u64 {
        let m = 20 + rng.next_below(81) as usize;
        let n = 2 * m;
        let seed = derive_seed(0xC4C4, trial);
        let h = sample_proper_cycle_code(n, m, 8, seed, 200).expect("cycle code samplable");
        let form = preprocess(&h, SolverMode::Ru).expect("full rank");
        let kinds = form.block_kinds();
        assert_eq!(
            kinds[0],
            BlockKind::Cycle,
            "criterion 4: first block not a cycle (trial {trial})"
        );
        assert!(
            kinds[1..].iter().all(|&k| k == BlockKind::Diagonal),
            "criterion 4: non-diagonal later block (trial {trial})"
        );
        let l = form.blocks().len();
        for i in 1..l {
            assert_ne!(
                form.coupling_weight(i - 1, i),
                0,
                "criterion 4: K_{{{},{}}} is zero (trial {trial})",
                i - 1,
                i
            );
        }
        for i in 2..l {
            for j in 0..=i - 2 {
                assert_eq!(
                    form.coupling_weight(j, i),
                    0,
                    "criterion 4: K_{{{j},{i}}} nonzero (trial {trial})"
                );
            }
        }
    }
    println!("criterion 4 (block structure on proper cycle codes): PASS - 50 codes, zero violations");
}

#[test]
fn criterion_5_linear_time_on_cycle_codes() {
    let lengths = [500usize, 1000, 2000, 4000];
    let mut totals = Vec::new();
    for (i, &n) in lengths.iter().enumerate() {
        let mut sum = 0.0;
        let codes = 3;
        for c in 0..codes {
            let h = sample_proper_cycle_code(n, n / 2, 8, derive_seed(0xC5, (i * 10 + c) as u64), 200)
                .expect("cycle code samplable");
            let form = preprocess(&h, SolverMode::Ru).expect("full rank");
            let (mu, alpha) = form.encoding_costs();
            sum += (mu + alpha) as f64;
        }
        totals.push(sum / codes as f64);
    }
    // least-squares slope through the origin and its relative residual
    let sn: f64 = lengths.iter().map(|&n| (n as f64) * (n as f64)).sum();
    let sy: f64 = lengths
        .iter()
        .zip(&totals)
        .map(|(&n, &y)| n as f64 * y)
        .sum();
    let slope = sy / sn;
    let res_norm: f64 = lengths
        .iter()
        .zip(&totals)
        .map(|(&n, &y)| (y - slope * n as f64).powi(2))
        .sum::<f64>()
        .sqrt();
    let y_norm: f64 = totals.iter().map(|y| y * y).sum::<f64>().sqrt();
    let rel_residual = res_norm / y_norm;
    let ratios: Vec<f64> = lengths
        .iter()
        .zip(&totals)
        .map(|(&n, &y)| y / n as f64)
        .collect();
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
        / ratios.iter().cloned().fold(f64::MAX, f64::min)
        - 1.0;
    assert!(
        rel_residual < 0.05,
        "criterion 5: slope fit residual {rel_residual:.4} >= 5%"
    );
    assert!(
        spread < 0.10,
        "criterion 5: per-n cost ratio varies by {:.1}% >= 10%",
        spread * 100.0
    );
    println!(
        "criterion 5 (linear time on cycle codes): PASS - slope {slope:.3} ops/symbol, residual {:.2}%, ratio spread {:.2}%",
        rel_residual * 100.0,
        spread * 100.0
    );
}

#[test]
fn criterion_6_binary_cycle_matrices_are_singular() {
    let f = field(1);
    for k in 2..=8usize {
        // over GF(2) the cycle matrix of size k is unique: all entries 1
        let mut entries = Vec::new();
        for i in 0..k {
            entries.push((i, i, 1u8));
            entries.push(((i + 1) % k, i, 1u8));
        }
        let c = SparseMatrix::from_entries(k, k, Arc::clone(&f), entries).unwrap();
        assert_eq!(c.gauss_rank(), k - 1, "criterion 6: rank at k={k}");
        assert!(
            matches!(
                cycle_precompute(&c, 0..k, 0..k),
                Err(CycleError::SingularCycle)
            ),
            "criterion 6: precompute accepted a singular binary cycle at k={k}"
        );
    }
    println!("criterion 6 (binary cycle matrices singular): PASS - exhaustive k <= 8, rank k-1, ell = 0 rejected");
}

/// Published averages used as soft magnitude targets.
const E8_N1000: [(PipelineKind, f64, f64); 3] = [
    (PipelineKind::Ru, 3613.71, 2614.82),
    (PipelineKind::Kaji, 3110.06, 1613.17),
    (PipelineKind::BlockTri, 2577.55, 1576.55),
];

#[test]
fn criterion_7_table_trend_e8() {
    let started = Instant::now();
    let cfg = ExperimentConfig {
        ensemble: EnsembleSpec::E8,
        n_list: vec![1000],
        q: None,
        trials: 100,
        seed: 0xE8,
        algos: vec![PipelineKind::Ru, PipelineKind::Kaji, PipelineKind::BlockTri],
        atm_solver: SolverMode::Ru,
        verify: true,
    };
    let report = run_experiment(&cfg).expect("experiment runs");
    assert!(
        !report.any_verification_failure(),
        "criterion 7: verification failure"
    );
    let avg = report.averages();
    let get = |k: PipelineKind| {
        let a = avg.iter().find(|a| a.algorithm == k).expect("algo present");
        (a.mul, a.add)
    };
    let (mu_ru, _alpha_ru) = get(PipelineKind::Ru);
    let (mu_k, alpha_k) = get(PipelineKind::Kaji);
    let (mu_p, alpha_p) = get(PipelineKind::BlockTri);
    assert!(
        mu_p < mu_k && mu_k < mu_ru,
        "criterion 7: multiplication ordering violated: {mu_p:.2} / {mu_k:.2} / {mu_ru:.2}"
    );
    assert!(
        alpha_p <= alpha_k,
        "criterion 7: addition ordering violated: {alpha_p:.2} > {alpha_k:.2}"
    );
    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 600.0, "criterion 7 exceeded 10 min: {secs:.0} s");

    let mut soft = String::new();
    for (kind, mu_ref, alpha_ref) in E8_N1000 {
        let (mu, alpha) = get(kind);
        let dev_mu = (mu - mu_ref).abs() / mu_ref;
        let dev_alpha = (alpha - alpha_ref).abs() / alpha_ref;
        soft.push_str(&format!(
            " {}: mu {:.2} ({:+.1}%), alpha {:.2} ({:+.1}%)",
            kind.as_str(),
            mu,
            dev_mu * 100.0 * (mu - mu_ref).signum(),
            alpha,
            dev_alpha * 100.0 * (alpha - alpha_ref).signum()
        ));
        if dev_mu > 0.25 || dev_alpha > 0.25 {
            soft.push_str(" [outside the +/-25% soft band]");
        }
    }
    println!(
        "criterion 7 (non-binary average trend): PASS - mu' {mu_p:.2} < mu_K {mu_k:.2} < mu_RU {mu_ru:.2}, alpha' {alpha_p:.2} <= alpha_K {alpha_k:.2}, {secs:.0} s;{soft}"
    );
}

#[test]
fn criterion_8_table_trend_e2_binary() {
    let cfg = ExperimentConfig {
        ensemble: EnsembleSpec::E2,
        n_list: vec![2000, 3000],
        q: None,
        trials: 20,
        seed: 0xE2,
        algos: vec![PipelineKind::Ru, PipelineKind::Kaji, PipelineKind::BlockTri],
        atm_solver: SolverMode::Ru,
        verify: true,
    };
    let report = run_experiment(&cfg).expect("experiment runs");
    assert!(
        !report.any_verification_failure(),
        "criterion 8: verification failure"
    );
    assert!(
        report.records.iter().all(|r| r.mul == 0),
        "criterion 8: nonzero reported multiplications on the binary field"
    );
    let avg = report.averages();
    let get = |k: PipelineKind, n: usize| {
        avg.iter()
            .find(|a| a.algorithm == k && a.n == n)
            .expect("cell present")
            .add
    };
    for n in [2000usize, 3000] {
        let alpha_ru = get(PipelineKind::Ru, n);
        let alpha_p = get(PipelineKind::BlockTri, n);
        assert!(
            alpha_p < alpha_ru,
            "criterion 8: alpha' {alpha_p:.2} >= alpha_RU {alpha_ru:.2} at n={n}"
        );
    }

    // soft target: LU-backed blocks beat the plain mode at short length
    let cfg_short = ExperimentConfig {
        ensemble: EnsembleSpec::E2,
        n_list: vec![1000],
        q: None,
        trials: 20,
        seed: 0xE2,
        algos: vec![PipelineKind::BlockTri, PipelineKind::BlockTriLu],
        atm_solver: SolverMode::Ru,
        verify: true,
    };
    let short = run_experiment(&cfg_short).expect("experiment runs");
    assert!(!short.any_verification_failure());
    let savg = short.averages();
    let alpha_plain = savg
        .iter()
        .find(|a| a.algorithm == PipelineKind::BlockTri)
        .unwrap()
        .add;
    let alpha_lu = savg
        .iter()
        .find(|a| a.algorithm == PipelineKind::BlockTriLu)
        .unwrap()
        .add;
    let soft = if alpha_lu < alpha_plain {
        "soft target met"
    } else {
        "soft target missed"
    };
    println!(
        "criterion 8 (binary average trend): PASS - mu = 0 reported everywhere; alpha' < alpha_RU at n=2000 ({:.2} < {:.2}) and n=3000 ({:.2} < {:.2}); LU mode at n=1000: {:.2} vs {:.2} ({soft})",
        get(PipelineKind::BlockTri, 2000),
        get(PipelineKind::Ru, 2000),
        get(PipelineKind::BlockTri, 3000),
        get(PipelineKind::Ru, 3000),
        alpha_lu,
        alpha_plain
    );
}

#[test]
fn criterion_9_permutation_only_guarantee() {
    let mut rng = SplitMix64::new(0xC9);
    let mut checked = 0;
    for trial in 0..50u64 {
        let h = match trial % 3 {
            0 => generic_ensemble(80 + (trial as usize % 5) * 8, 8, derive_seed(0xC9C9, trial)),
            1 => generic_ensemble(90 + (trial as usize % 7) * 6, 2, derive_seed(0xC9C9, trial)),
            _ => {
                let m = 15 + rng.next_below(20) as usize;
                sample_proper_cycle_code(2 * m, m, 8, derive_seed(0xC9C9, trial), 200)
                    .expect("cycle code samplable")
            }
        };
        let mode = if trial % 2 == 0 {
            SolverMode::Ru
        } else {
            SolverMode::Lu
        };
        let form = preprocess(&h, mode).expect("full rank");
        assert_eq!(
            form.h().weight(),
            h.weight(),
            "criterion 9: weight changed (trial {trial})"
        );
        assert!(
            form.verify_permutation(&h),
            "criterion 9: P H Q != H' (trial {trial})"
        );
        checked += 1;
    }
    println!(
        "criterion 9 (permutation-only guarantee): PASS - {checked} preprocesses, wt preserved and P H Q = H' entry for entry"
    );
}
