//! The iterative preprocessing stage.
//!
//! Each round works on the window of still-undetermined rows and columns
//! `[f, m) x [f, n - g)` and fixes one diagonal block:
//!
//! - weight-1 columns present: extract a diagonal block, one chosen column
//!   per touched row; surplus weight-1 columns go to the rear (they join
//!   the message part).
//! - otherwise, non-binary field and the weight-2 columns contain a cycle:
//!   extract a smallest nonsingular cycle matrix.
//! - otherwise search the smallest first-block row count (from half the
//!   window upward, using the prefix-stable greedy partition) whose `B1` is
//!   horizontal and full rank, triangulate `B1` and send its residual
//!   columns to the rear.
//! - if no such split exists, triangulate the whole window as one ATM;
//!   this consumes every remaining row.
//!
//! Rounds only permute rows and columns, so `P H Q = H'` holds throughout;
//! the front boundary `f` strictly grows, which guarantees termination.
//! Solver payloads are built after the loop from the final windows (block
//! windows never move once fixed).

use crate::atm::{approximate_triangulate, atm_form_from_square, AtmError};
use crate::cyclegraph::{build_associated_graph, cycle_precompute, minimal_cycle_candidates};
use crate::lufact::lu_factorize;
use crate::sbbd::{exclusive_column_counts, greedy_row_order};
use crate::spmat::{Permutation, SparseMatrix};

use thiserror::Error;

use super::{BlockSolver, BlockTriangularForm, DiagonalBlock, SolverMode};

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("parity-check matrix is rank deficient: {0}")]
    RankDeficient(AtmError),
    #[error("matrix must have more columns than rows, got {m}x{n}")]
    NotAParityCheck { m: usize, n: usize },
    #[error("internal inconsistency while building block solvers: {0}")]
    Internal(String),
}

/// What one round decided: where every window row and column goes, how many
/// columns retire to the rear, and which kind of block was fixed.
struct Round {
    /// Window-local rows in destination order (position i takes row `row_order[i]`).
    row_order: Vec<usize>,
    /// Window-local columns in destination order; the last `rear` entries
    /// leave the window for the rear zone.
    col_order: Vec<usize>,
    rear: usize,
    block_size: usize,
    kind: PendingKind,
}

enum PendingKind {
    Diagonal,
    Cycle,
    Atm { delta: usize },
}

/// Transforms a full-rank parity-check matrix into block-triangular form.
pub fn preprocess(
    h: &SparseMatrix,
    solver_mode: SolverMode,
) -> Result<BlockTriangularForm, PreprocessError> {
    let m = h.rows();
    let n = h.cols();
    if m == 0 || n <= m {
        return Err(PreprocessError::NotAParityCheck { m, n });
    }
    let q_order = h.field().q();

    let mut cur = h.clone();
    let mut p_acc = Permutation::identity(m);
    let mut q_acc = Permutation::identity(n);
    let mut front = 0usize; // f_t: determined front columns (= determined rows)
    let mut rear = 0usize; // g_t: determined rear columns
    let mut pending: Vec<(usize, usize, PendingKind)> = Vec::new(); // offset, size, kind

    while front < m {
        let wrows = front..m;
        let wcols = front..(n - rear);
        let ws = cur.window_copy(wrows.clone(), wcols.clone());

        let round = if let Some(r) = try_weight_one_round(&ws) {
            r
        } else if q_order > 2 {
            match try_cycle_round(&ws) {
                Some(r) => r,
                None => sbbd_or_full_atm_round(&ws).map_err(PreprocessError::RankDeficient)?,
            }
        } else {
            sbbd_or_full_atm_round(&ws).map_err(PreprocessError::RankDeficient)?
        };

        // sub-step (e): embed the round permutations and advance
        let row_perm = Permutation::embed(&placement_to_perm(&round.row_order), front, m);
        let col_perm = Permutation::embed(&placement_to_perm(&round.col_order), front, n);
        cur = cur
            .permute(&row_perm, &col_perm)
            .expect("embedded permutations match dimensions");
        p_acc = p_acc.then(&row_perm);
        q_acc = q_acc.then(&col_perm);
        pending.push((front, round.block_size, round.kind));
        front += round.block_size;
        rear += round.rear;
        debug_assert!(front + (n - front - rear) + rear == n);
    }

    // build the solver payloads from the final windows
    let f = cur.field().clone();
    let mut blocks = Vec::with_capacity(pending.len());
    for (offset, size, kind) in pending {
        let rows = offset..offset + size;
        let cols = offset..offset + size;
        let solver = match kind {
            PendingKind::Diagonal => {
                let mut inv_diag = Vec::with_capacity(size);
                for i in 0..size {
                    let v = cur.get(offset + i, offset + i);
                    let inv = f.checked_inv(v).ok_or_else(|| {
                        PreprocessError::Internal(format!(
                            "diagonal block has zero at {}",
                            offset + i
                        ))
                    })?;
                    inv_diag.push(inv);
                }
                BlockSolver::Diagonal { inv_diag }
            }
            PendingKind::Cycle => {
                let pre = cycle_precompute(&cur, rows, cols)
                    .map_err(|e| PreprocessError::Internal(e.to_string()))?;
                BlockSolver::Cycle(pre)
            }
            PendingKind::Atm { delta } => {
                let a = cur.window_copy(rows, cols);
                match solver_mode {
                    SolverMode::Ru => {
                        let form = atm_form_from_square(a, delta)
                            .map_err(|e| PreprocessError::Internal(e.to_string()))?;
                        BlockSolver::AtmRu(form)
                    }
                    SolverMode::Lu => {
                        let lu = lu_factorize(&a)
                            .map_err(|e| PreprocessError::Internal(e.to_string()))?;
                        BlockSolver::AtmLu(lu)
                    }
                }
            }
        };
        blocks.push(DiagonalBlock {
            offset,
            size,
            solver,
        });
    }

    let form = BlockTriangularForm {
        h: cur,
        p: p_acc,
        q: q_acc,
        blocks,
        solver_mode,
    };
    debug_assert!(form.check_shape());
    debug_assert!(form.verify_permutation(h));
    Ok(form)
}

fn placement_to_perm(order: &[usize]) -> Permutation {
    let mut map = vec![0usize; order.len()];
    for (i, &x) in order.iter().enumerate() {
        map[x] = i;
    }
    Permutation::from_map(map).expect("placement list is a bijection")
}

/// Sub-step (a): diagonal block from weight-1 columns. One column per
/// distinct touched row (first column wins); surplus weight-1 columns go to
/// the rear.
fn try_weight_one_round(ws: &SparseMatrix) -> Option<Round> {
    let rows = ws.rows();
    let cols = ws.cols();
    let mut claimed_by = vec![usize::MAX; rows];
    let mut chosen: Vec<(usize, usize)> = Vec::new(); // (row, col) in claim order
    let mut surplus: Vec<usize> = Vec::new();
    for c in 0..cols {
        if let [(r, _)] = *ws.col(c) {
            if claimed_by[r] == usize::MAX {
                claimed_by[r] = c;
                chosen.push((r, c));
            } else {
                surplus.push(c);
            }
        }
    }
    if chosen.is_empty() {
        return None;
    }

    let block_size = chosen.len();
    let mut row_order: Vec<usize> = chosen.iter().map(|&(r, _)| r).collect();
    row_order.extend((0..rows).filter(|&r| claimed_by[r] == usize::MAX));

    let mut in_front = vec![false; cols];
    let mut to_rear = vec![false; cols];
    for &(_, c) in &chosen {
        in_front[c] = true;
    }
    for &c in &surplus {
        to_rear[c] = true;
    }
    let mut col_order: Vec<usize> = chosen.iter().map(|&(_, c)| c).collect();
    col_order.extend((0..cols).filter(|&c| !in_front[c] && !to_rear[c]));
    col_order.extend(surplus.iter().copied());

    Some(Round {
        row_order,
        col_order,
        rear: to_rear.iter().filter(|&&t| t).count(),
        block_size,
        kind: PendingKind::Diagonal,
    })
}

/// Sub-step (b): smallest nonsingular cycle matrix from the weight-2
/// columns. Singular candidates (`ell = 0`) are skipped; if every minimal
/// candidate is singular the caller falls through to the SBBD path.
fn try_cycle_round(ws: &SparseMatrix) -> Option<Round> {
    let graph = build_associated_graph(ws, 0..ws.rows(), 0..ws.cols());
    let candidates = minimal_cycle_candidates(&graph);
    let f = ws.field();
    'candidate: for cand in &candidates {
        let k = cand.len();
        // ell = 1 + prod(beta_i / gamma_i) over the oriented cycle
        let mut prod = 1u8;
        for i in 0..k {
            let col = graph.edge(cand.edges[i]).2;
            let v_i = cand.vertices[i];
            let v_next = cand.vertices[(i + 1) % k];
            let gamma = ws.get(v_i, col);
            let beta = ws.get(v_next, col);
            if gamma == 0 || beta == 0 {
                continue 'candidate; // not this orientation; defensive
            }
            prod = f.mul(prod, f.mul(beta, f.inv(gamma)));
        }
        if f.add(1, prod) == 0 {
            continue; // singular cycle, try the next smallest
        }

        let rows = ws.rows();
        let cols = ws.cols();
        let mut in_cycle_row = vec![false; rows];
        for &v in &cand.vertices {
            in_cycle_row[v] = true;
        }
        let cycle_cols: Vec<usize> = cand.edges.iter().map(|&e| graph.edge(e).2).collect();
        let mut in_cycle_col = vec![false; cols];
        for &c in &cycle_cols {
            in_cycle_col[c] = true;
        }
        let mut row_order = cand.vertices.clone();
        row_order.extend((0..rows).filter(|&r| !in_cycle_row[r]));
        let mut col_order = cycle_cols;
        col_order.extend((0..cols).filter(|&c| !in_cycle_col[c]));
        return Some(Round {
            row_order,
            col_order,
            rear: 0,
            block_size: k,
            kind: PendingKind::Cycle,
        });
    }
    None
}

/// Sub-steps (c) and (d): search the smallest workable first-block size for
/// a bordered split; fall back to one ATM over the whole window.
fn sbbd_or_full_atm_round(ws: &SparseMatrix) -> Result<Round, AtmError> {
    let rows = ws.rows();
    let order = greedy_row_order(ws);
    let n1_of = exclusive_column_counts(ws, &order);

    let mut in_prefix = vec![false; rows];
    let mut prefix_len = 0usize;
    for m1 in rows.div_ceil(2)..rows {
        // grow the prefix membership incrementally
        while prefix_len < m1 {
            in_prefix[order[prefix_len]] = true;
            prefix_len += 1;
        }
        if n1_of[m1] < m1 {
            continue; // B1 vertical
        }
        let b1_rows: Vec<usize> = (0..rows).filter(|&r| in_prefix[r]).collect();
        let b1_cols: Vec<usize> = (0..ws.cols())
            .filter(|&c| {
                let col = ws.col(c);
                !col.is_empty() && col.iter().all(|&(r, _)| in_prefix[r])
            })
            .collect();
        debug_assert_eq!(b1_cols.len(), n1_of[m1]);
        let b1 = ws.submatrix(&b1_rows, &b1_cols);
        if b1.rank_window(0..m1, 0..b1_cols.len()) < m1 {
            continue; // B1 horizontal but rank deficient
        }
        return Ok(small_atm_round(ws, &b1, &b1_rows, &b1_cols));
    }

    // Condition (D): one ATM over the whole window, no rear columns
    let skel = approximate_triangulate(ws, 0..rows, 0..ws.cols())?;
    Ok(Round {
        row_order: skel.row_perm.inverse().map().to_vec(),
        col_order: skel.col_perm.inverse().map().to_vec(),
        rear: 0,
        block_size: rows,
        kind: PendingKind::Atm { delta: skel.delta },
    })
}

/// Sub-step (c) proper: triangulate `B1`, order the window as
/// `[A | B2-cols | border | residual B1 cols]`, residuals rearward.
fn small_atm_round(
    ws: &SparseMatrix,
    b1: &SparseMatrix,
    b1_rows: &[usize],
    b1_cols: &[usize],
) -> Round {
    let m1 = b1_rows.len();
    let n1 = b1_cols.len();
    let skel = approximate_triangulate(b1, 0..m1, 0..n1)
        .expect("B1 was rank checked before triangulation");

    let mut in_b1_row = vec![false; ws.rows()];
    for &r in b1_rows {
        in_b1_row[r] = true;
    }
    let mut in_b1_col = vec![false; ws.cols()];
    for &c in b1_cols {
        in_b1_col[c] = true;
    }

    let b1_row_order = skel.row_perm.inverse();
    let mut row_order: Vec<usize> = b1_row_order.map().iter().map(|&i| b1_rows[i]).collect();
    row_order.extend((0..ws.rows()).filter(|&r| !in_b1_row[r]));

    // columns touched only by the remaining rows stay in the window ahead of
    // the border columns, matching the bordered layout
    let mut b2_cols = Vec::new();
    let mut border_cols = Vec::new();
    for c in 0..ws.cols() {
        if in_b1_col[c] {
            continue;
        }
        let touches_b1 = ws.col(c).iter().any(|&(r, _)| in_b1_row[r]);
        if touches_b1 {
            border_cols.push(c);
        } else {
            b2_cols.push(c);
        }
    }

    let b1_col_order = skel.col_perm.inverse();
    let mut col_order: Vec<usize> = b1_col_order.map()[..m1]
        .iter()
        .map(|&j| b1_cols[j])
        .collect();
    col_order.extend(b2_cols);
    col_order.extend(border_cols);
    // residual B1 columns retire to the rear, preserving their order
    col_order.extend(b1_col_order.map()[m1..].iter().map(|&j| b1_cols[j]));

    Round {
        row_order,
        col_order,
        rear: n1 - m1,
        block_size: m1,
        kind: PendingKind::Atm { delta: skel.delta },
    }
}
