//! Singly bordered block-diagonalization heuristic.
//!
//! `sbbd(W, m1)` permutes a window into
//!
//! ```text
//! [ B1  O   Z1 ]   B1: m1 x n1, rows picked greedily
//! [ O   B2  Z2 ]   B2: (r - m1) x n2
//! ```
//!
//! where the border `[Z1; Z2]` holds the columns touched by both row
//! blocks. Rows are assigned greedily: the first block is seeded with the
//! lightest row and grown by repeatedly adding the unassigned row with the
//! largest column-support overlap with the block so far (ties: fewer new
//! columns, then lower index). The greedy order does not depend on `m1`, so
//! growing `m1` by one extends the same prefix; callers searching for a
//! full-rank horizontal `B1` exploit that. A valid result always exists;
//! in the worst case every column lands in the border.

use std::ops::Range;

use thiserror::Error;

use crate::oracle::DenseMatrix;
use crate::spmat::{Permutation, SparseMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SbbdError {
    #[error("B1 is vertical: m1={m1} rows but only {n1} columns")]
    Vertical { m1: usize, n1: usize },
    #[error("B1 is rank deficient: rank {rank} < {m1}")]
    RankDeficient { rank: usize, m1: usize },
}

/// Permutations and block sizes of one bordered block-diagonalization.
/// All index spaces are window-local.
#[derive(Debug, Clone)]
pub struct SbbdResult {
    pub row_perm: Permutation,
    pub col_perm: Permutation,
    pub m1: usize,
    pub n1: usize,
    pub n2: usize,
}

impl SbbdResult {
    pub fn border_width(&self) -> usize {
        self.col_perm.size() - self.n1 - self.n2
    }
}

/// Greedy row order used by the partition; prefix-stable in `m1`.
///
/// Returns window-local row indices in pick order.
pub fn greedy_row_order(ws: &SparseMatrix) -> Vec<usize> {
    let r = ws.rows();
    if r == 0 {
        return Vec::new();
    }
    let weights: Vec<usize> = (0..r).map(|i| ws.row(i).len()).collect();
    let mut assigned = vec![false; r];
    let mut overlap = vec![0usize; r];
    let mut col_touched = vec![false; ws.cols()];
    let mut order = Vec::with_capacity(r);

    let seed = (0..r)
        .min_by_key(|&i| (weights[i], i))
        .expect("window has rows");
    let add = |row: usize,
                   assigned: &mut Vec<bool>,
                   overlap: &mut Vec<usize>,
                   col_touched: &mut Vec<bool>| {
        assigned[row] = true;
        for &(c, _) in ws.row(row) {
            if !col_touched[c] {
                col_touched[c] = true;
                for &(r2, _) in ws.col(c) {
                    overlap[r2] += 1;
                }
            }
        }
    };
    add(seed, &mut assigned, &mut overlap, &mut col_touched);
    order.push(seed);

    for _ in 1..r {
        let mut best: Option<(usize, (usize, usize, usize))> = None;
        for i in 0..r {
            if assigned[i] {
                continue;
            }
            // maximize overlap; then fewer new columns; then lower index
            let key = (usize::MAX - overlap[i], weights[i] - overlap[i], i);
            if best.map_or(true, |(_, bk)| key < bk) {
                best = Some((i, key));
            }
        }
        let (pick, _) = best.expect("unassigned row exists");
        add(pick, &mut assigned, &mut overlap, &mut col_touched);
        order.push(pick);
    }
    order
}

/// Column classification for an `m1`-prefix of a greedy order. Callers
/// searching over `m1` compute the order once and partition per prefix.
pub fn partition_for_prefix(ws: &SparseMatrix, order: &[usize], m1: usize) -> SbbdResult {
    let r = ws.rows();
    let w = ws.cols();
    let mut in_block1 = vec![false; r];
    for &row in &order[..m1] {
        in_block1[row] = true;
    }
    let mut touch1 = vec![false; w];
    let mut touch2 = vec![false; w];
    for row in 0..r {
        for &(c, _) in ws.row(row) {
            if in_block1[row] {
                touch1[c] = true;
            } else {
                touch2[c] = true;
            }
        }
    }
    let mut group1 = Vec::new();
    let mut group2 = Vec::new();
    let mut border = Vec::new();
    for c in 0..w {
        match (touch1[c], touch2[c]) {
            (true, false) => group1.push(c),
            (true, true) => border.push(c),
            // untouched columns are zero in both blocks; keep them with B2
            _ => group2.push(c),
        }
    }
    let (n1, n2) = (group1.len(), group2.len());

    let mut row_order: Vec<usize> = (0..r).filter(|&i| in_block1[i]).collect();
    row_order.extend((0..r).filter(|&i| !in_block1[i]));
    let mut col_order = group1;
    col_order.extend(group2);
    col_order.extend(border);

    SbbdResult {
        row_perm: placement_to_perm(&row_order),
        col_perm: placement_to_perm(&col_order),
        m1,
        n1,
        n2,
    }
}

fn placement_to_perm(order: &[usize]) -> Permutation {
    let mut map = vec![0usize; order.len()];
    for (i, &x) in order.iter().enumerate() {
        map[x] = i;
    }
    Permutation::from_map(map).expect("placement list is a bijection")
}

/// Bordered block-diagonalization of a window with `m1` rows in the first
/// block.
pub fn sbbd(
    m: &SparseMatrix,
    row_range: Range<usize>,
    col_range: Range<usize>,
    m1: usize,
) -> SbbdResult {
    assert!(
        m1 > 0 && m1 < row_range.len(),
        "m1 must satisfy 0 < m1 < rows"
    );
    let ws = m.window_copy(row_range, col_range);
    let order = greedy_row_order(&ws);
    partition_for_prefix(&ws, &order, m1)
}

/// Fast access to `n1` as a function of the prefix length, for searching the
/// smallest `m1` with a horizontal `B1`. `n1_of[k]` is the number of columns
/// whose support lies entirely in the first `k` rows of the greedy order
/// (zero-weight columns excluded, matching [`sbbd`]'s classification).
pub fn exclusive_column_counts(ws: &SparseMatrix, order: &[usize]) -> Vec<usize> {
    let r = ws.rows();
    let mut pos = vec![0usize; r];
    for (i, &row) in order.iter().enumerate() {
        pos[row] = i;
    }
    let mut n1_of = vec![0usize; r + 1];
    for c in 0..ws.cols() {
        let col = ws.col(c);
        if col.is_empty() {
            continue;
        }
        let last = col.iter().map(|&(row, _)| pos[row]).max().unwrap();
        n1_of[last + 1] += 1;
    }
    for k in 1..=r {
        n1_of[k] += n1_of[k - 1];
    }
    n1_of
}

/// Moves `m1` independent columns of a full-rank horizontal `B1` to the
/// front, giving `[F1 R1 O Z1]` on the first row block with `F1`
/// nonsingular. Returns the refined column permutation (replacing
/// `res.col_perm`); rows are untouched.
pub fn extract_nonsingular(
    m: &SparseMatrix,
    row_range: Range<usize>,
    col_range: Range<usize>,
    res: &SbbdResult,
) -> Result<Permutation, SbbdError> {
    if res.n1 < res.m1 {
        return Err(SbbdError::Vertical {
            m1: res.m1,
            n1: res.n1,
        });
    }
    let ws = m.window_copy(row_range, col_range);
    let permuted = ws
        .permute(&res.row_perm, &res.col_perm)
        .expect("window-local permutations fit");
    let b1 = DenseMatrix::from_sparse_window(&permuted, 0..res.m1, 0..res.n1);
    let Some(chosen) = first_independent_columns(&b1, res.m1) else {
        let rank = b1.rank();
        return Err(SbbdError::RankDeficient { rank, m1: res.m1 });
    };

    let mut is_chosen = vec![false; res.n1];
    for &c in &chosen {
        is_chosen[c] = true;
    }
    let mut b1_order = chosen.clone();
    b1_order.extend((0..res.n1).filter(|&c| !is_chosen[c]));
    let refine = Permutation::embed(
        &placement_to_perm(&b1_order),
        0,
        res.col_perm.size(),
    );
    Ok(res.col_perm.then(&refine))
}

/// Greedy left-to-right choice of `need` linearly independent columns.
fn first_independent_columns(m: &DenseMatrix, need: usize) -> Option<Vec<usize>> {
    let f = m.field().clone();
    let rows = m.rows();
    let mut basis: Vec<(usize, Vec<u8>)> = Vec::new(); // (pivot row, normalized col)
    let mut chosen = Vec::new();
    for c in 0..m.cols() {
        let mut col: Vec<u8> = (0..rows).map(|r| m.get(r, c)).collect();
        for (pivot, vec) in &basis {
            let lead = col[*pivot];
            if lead != 0 {
                for (x, y) in col.iter_mut().zip(vec) {
                    *x = f.add(*x, f.mul(lead, *y));
                }
            }
        }
        if let Some(pivot) = col.iter().position(|&x| x != 0) {
            let inv = f.inv(col[pivot]);
            for x in col.iter_mut() {
                *x = f.mul(*x, inv);
            }
            basis.push((pivot, col));
            chosen.push(c);
            if chosen.len() == need {
                return Some(chosen);
            }
        }
    }
    None
}

/// Checks the zero-block invariant of a result against the window it came
/// from. Exposed for tests and debug assertions.
pub fn check_sbbd_shape(
    m: &SparseMatrix,
    row_range: Range<usize>,
    col_range: Range<usize>,
    res: &SbbdResult,
) -> bool {
    let ws = m.window_copy(row_range, col_range);
    let permuted = ws
        .permute(&res.row_perm, &res.col_perm)
        .expect("window-local permutations fit");
    let r = permuted.rows();
    permuted.is_zero_window(0..res.m1, res.n1..res.n1 + res.n2)
        && permuted.is_zero_window(res.m1..r, 0..res.n1)
}
