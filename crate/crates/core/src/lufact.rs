//! Sparse LU factorization over F_q with Markowitz pivoting, and the
//! counted triangular solves built on it.
//!
//! `P A Q = L U` with permutation-only pivoting: `L` is lower triangular and
//! keeps the pivot values on its diagonal, `U` is upper triangular with its
//! unit diagonal stored explicitly. Both triangular solves follow the wt / S
//! counting convention (stored ones included), so a full solve costs exactly
//! `wt(L) + wt(U)` multiplications and `S(L) + S(U)` additions.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::galois::FieldElement;
use crate::spmat::{CostProfile, Permutation, SparseMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LuError {
    #[error("matrix is singular (no pivot at step {0})")]
    Singular(usize),
}

/// LU factorization of a square window: `l * u = permuted A`.
#[derive(Debug, Clone)]
pub struct LuForm {
    size: usize,
    l: SparseMatrix,
    u: SparseMatrix,
    row_perm: Permutation,
    col_perm: Permutation,
}

/// Factorizes a square nonsingular matrix. The pivot at each step is the
/// nonzero entry minimizing the Markowitz fill score
/// `(row_weight - 1) * (col_weight - 1)` over the active submatrix, ties
/// broken by row then column index.
pub fn lu_factorize(a: &SparseMatrix) -> Result<LuForm, LuError> {
    assert_eq!(a.rows(), a.cols(), "lu_factorize needs a square matrix");
    let n = a.rows();
    let f = Arc::clone(a.field());

    let mut rows: Vec<HashMap<usize, FieldElement>> = (0..n)
        .map(|r| a.row(r).iter().copied().collect())
        .collect();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (r, row) in rows.iter().enumerate() {
        for (&c, _) in row {
            col_rows[c].insert(r);
        }
    }
    let mut col_active = vec![true; n];
    let mut final_row = vec![usize::MAX; n];
    let mut final_col = vec![usize::MAX; n];
    // entries keyed by original indices, remapped once the elimination order
    // is complete
    let mut l_entries: Vec<(usize, usize, FieldElement)> = Vec::new(); // (row, step, v)
    let mut u_entries: Vec<(usize, usize, FieldElement)> = Vec::new(); // (step, col, v)

    for step in 0..n {
        // Markowitz pivot search over the active submatrix
        let mut best: Option<(usize, usize, usize)> = None; // (score, row, col)
        for (c, rows_of_c) in col_rows.iter().enumerate() {
            if !col_active[c] {
                continue;
            }
            let cw = rows_of_c.len();
            if cw == 0 {
                continue;
            }
            for &r in rows_of_c {
                let score = (rows[r].len() - 1) * (cw - 1);
                let cand = (score, r, c);
                if best.map_or(true, |b| cand < b) {
                    best = Some(cand);
                }
            }
        }
        let Some((_, pr, pc)) = best else {
            return Err(LuError::Singular(step));
        };
        final_row[pr] = step;
        final_col[pc] = step;
        let piv = rows[pr][&pc];
        let inv_piv = f.inv(piv);

        // U row `step`: pivot row scaled to a unit pivot
        let mut pivot_row: Vec<(usize, FieldElement)> =
            rows[pr].iter().map(|(&c, &v)| (c, v)).collect();
        pivot_row.sort_unstable_by_key(|&(c, _)| c);
        for &(c, v) in &pivot_row {
            u_entries.push((step, c, f.mul(v, inv_piv)));
        }
        // L column `step`: the unscaled pivot column (pivot value included)
        let col_members: Vec<usize> = col_rows[pc].iter().copied().collect();
        for &r in &col_members {
            l_entries.push((r, step, rows[r][&pc]));
        }

        // eliminate: row_i -= (A[i,pc] / piv) * pivot_row
        for &r in &col_members {
            if r == pr {
                continue;
            }
            let factor = f.mul(rows[r][&pc], inv_piv);
            for &(c, v) in &pivot_row {
                if c == pc {
                    continue;
                }
                let delta = f.mul(factor, v);
                match rows[r].entry(c) {
                    std::collections::hash_map::Entry::Occupied(mut e) => {
                        let nv = f.add(*e.get(), delta);
                        if nv == 0 {
                            e.remove();
                            col_rows[c].remove(&r);
                        } else {
                            *e.get_mut() = nv;
                        }
                    }
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(delta);
                        col_rows[c].insert(r);
                    }
                }
            }
            rows[r].remove(&pc);
        }
        // retire the pivot row and column
        for (&c, _) in &rows[pr] {
            col_rows[c].remove(&pr);
        }
        rows[pr].clear();
        col_rows[pc].clear();
        col_active[pc] = false;
    }

    let l = SparseMatrix::from_entries(
        n,
        n,
        Arc::clone(&f),
        l_entries
            .into_iter()
            .map(|(r, k, v)| (final_row[r], k, v)),
    )
    .expect("elimination produces valid entries");
    let u = SparseMatrix::from_entries(
        n,
        n,
        Arc::clone(&f),
        u_entries
            .into_iter()
            .map(|(k, c, v)| (k, final_col[c], v)),
    )
    .expect("elimination produces valid entries");

    Ok(LuForm {
        size: n,
        l,
        u,
        row_perm: Permutation::from_map(final_row).expect("every row pivots once"),
        col_perm: Permutation::from_map(final_col).expect("every column pivots once"),
    })
}

impl LuForm {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn l(&self) -> &SparseMatrix {
        &self.l
    }

    pub fn u(&self) -> &SparseMatrix {
        &self.u
    }

    pub fn row_perm(&self) -> &Permutation {
        &self.row_perm
    }

    pub fn col_perm(&self) -> &Permutation {
        &self.col_perm
    }

    /// Solves `A p^T = b^T` by the two triangular substitutions. Charges
    /// exactly [`LuForm::lu_costs`].
    pub fn lu_solve(&self, b: &[FieldElement], profile: &mut CostProfile) -> Vec<FieldElement> {
        assert_eq!(b.len(), self.size, "dimension mismatch");
        let f = self.l.field();
        let n = self.size;
        let c = self.row_perm.scatter(b);

        // forward: L v = c, pivot diagonal stored
        let mut v = vec![0u8; n];
        for i in 0..n {
            let mut acc = c[i];
            let mut diag = 0;
            for &(j, val) in self.l.row(i) {
                if j < i {
                    let prod = f.mul(val, v[j]);
                    profile.add_muls(1);
                    acc = f.add(acc, prod);
                    profile.add_adds(1);
                } else {
                    diag = val;
                }
            }
            v[i] = f.mul(acc, f.inv(diag));
            profile.add_muls(1);
        }
        // backward: U y = v, stored unit diagonal still costs its multiply
        let mut y = vec![0u8; n];
        for i in (0..n).rev() {
            let mut acc = v[i];
            let mut diag = 0;
            for &(j, val) in self.u.row(i) {
                if j > i {
                    let prod = f.mul(val, y[j]);
                    profile.add_muls(1);
                    acc = f.add(acc, prod);
                    profile.add_adds(1);
                } else {
                    diag = val;
                }
            }
            y[i] = f.mul(acc, f.inv(diag));
            profile.add_muls(1);
        }
        self.col_perm.gather(&y)
    }

    /// Closed-form solve cost: `(wt(L) + wt(U), S(L) + S(U))`.
    pub fn lu_costs(&self) -> (u64, u64) {
        let n = self.size;
        let sl = self.l.weight_stats(0..n, 0..n);
        let su = self.u.weight_stats(0..n, 0..n);
        (sl.wt + su.wt, sl.s + su.s)
    }
}
