//! Shared helpers for unit tests.

use std::sync::Arc;

use crate::galois::{build_field, FieldTable};
use crate::rng::SplitMix64;
use crate::spmat::{Permutation, SparseMatrix};

pub(crate) fn field(p: u32) -> Arc<FieldTable> {
    Arc::new(build_field(p).unwrap())
}

pub(crate) fn random_matrix(
    rows: usize,
    cols: usize,
    density: f64,
    f: &Arc<FieldTable>,
    rng: &mut SplitMix64,
) -> SparseMatrix {
    let q = f.q() as u64;
    let mut entries = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if rng.next_f64() < density {
                entries.push((r, c, (1 + rng.next_below(q - 1)) as u8));
            }
        }
    }
    SparseMatrix::from_entries(rows, cols, Arc::clone(f), entries).unwrap()
}

/// Random full-rank matrix; retries fresh draws until the rank check passes.
pub(crate) fn random_full_rank_matrix(
    rows: usize,
    cols: usize,
    density: f64,
    f: &Arc<FieldTable>,
    rng: &mut SplitMix64,
) -> SparseMatrix {
    loop {
        let m = random_matrix(rows, cols, density, f, rng);
        if m.gauss_rank() == rows {
            return m;
        }
    }
}

pub(crate) fn random_permutation(k: usize, rng: &mut SplitMix64) -> Permutation {
    let mut map: Vec<usize> = (0..k).collect();
    rng.shuffle(&mut map);
    Permutation::from_map(map).unwrap()
}

pub(crate) fn random_vector(len: usize, f: &Arc<FieldTable>, rng: &mut SplitMix64) -> Vec<u8> {
    (0..len).map(|_| rng.next_below(f.q() as u64) as u8).collect()
}
