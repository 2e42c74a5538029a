//! Dense Gaussian-elimination reference solver and encoder over F_q.
//!
//! Ground truth for the sparse solvers' correctness tests. Nothing here is
//! instrumented: the oracle counts no operations and exploits no structure.

use std::ops::Range;
use std::sync::Arc;

use thiserror::Error;

use crate::galois::{FieldElement, FieldTable};
use crate::spmat::SparseMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("matrix is singular")]
    Singular,
    #[error("parity-check matrix is rank deficient (rank {rank} < {rows})")]
    RankDeficient { rank: usize, rows: usize },
}

/// Row-major dense matrix over F_q.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
    field: Arc<FieldTable>,
}

impl DenseMatrix {
    pub fn zero(rows: usize, cols: usize, field: Arc<FieldTable>) -> Self {
        assert!(rows > 0 && cols > 0, "dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
            field,
        }
    }

    pub fn identity(n: usize, field: Arc<FieldTable>) -> Self {
        let mut m = Self::zero(n, n, field);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_sparse(m: &SparseMatrix) -> Self {
        let mut d = Self::zero(m.rows(), m.cols(), Arc::clone(m.field()));
        for (r, c, v) in m.entries() {
            d.set(r, c, v);
        }
        d
    }

    pub fn from_sparse_window(
        m: &SparseMatrix,
        row_range: Range<usize>,
        col_range: Range<usize>,
    ) -> Self {
        let mut d = Self::zero(row_range.len(), col_range.len(), Arc::clone(m.field()));
        for (i, r) in row_range.enumerate() {
            for &(c, v) in m.row_in(r, &col_range) {
                d.set(i, c - col_range.start, v);
            }
        }
        d
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Arc<FieldTable> {
        &self.field
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn weight(&self) -> u64 {
        self.data.iter().filter(|&&v| v != 0).count() as u64
    }

    pub fn matvec(&self, x: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(x.len(), self.cols, "dimension mismatch");
        let f = &self.field;
        (0..self.rows)
            .map(|r| {
                let mut acc = 0;
                for c in 0..self.cols {
                    acc = f.add(acc, f.mul(self.get(r, c), x[c]));
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let f = Arc::clone(&self.field);
        let mut out = DenseMatrix::zero(self.rows, other.cols, Arc::clone(&f));
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let t = f.mul(a, other.get(k, c));
                    out.set(r, c, f.add(out.get(r, c), t));
                }
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|r| (0..self.cols).all(|c| self.get(r, c) == u8::from(r == c)))
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        let f = Arc::clone(&work.field);
        let mut rank = 0;
        for c in 0..work.cols {
            if rank == work.rows {
                break;
            }
            let Some(p) = (rank..work.rows).find(|&r| work.get(r, c) != 0) else {
                continue;
            };
            work.swap_rows(rank, p);
            let inv = f.inv(work.get(rank, c));
            for r in rank + 1..work.rows {
                let lead = work.get(r, c);
                if lead == 0 {
                    continue;
                }
                let factor = f.mul(lead, inv);
                for j in c..work.cols {
                    let t = f.mul(factor, work.get(rank, j));
                    work.set(r, j, f.add(work.get(r, j), t));
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            let t = self.get(a, c);
            self.set(a, c, self.get(b, c));
            self.set(b, c, t);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            let t = self.get(r, a);
            self.set(r, a, self.get(r, b));
            self.set(r, b, t);
        }
    }

    /// Solves `A x^T = b^T` for square nonsingular `A` by full-pivot
    /// elimination on a copy.
    pub fn solve(&self, b: &[FieldElement]) -> Result<Vec<FieldElement>, OracleError> {
        assert_eq!(self.rows, self.cols, "solve needs a square matrix");
        assert_eq!(b.len(), self.rows, "dimension mismatch");
        let n = self.rows;
        let f = Arc::clone(&self.field);
        let mut work = self.clone();
        let mut rhs = b.to_vec();
        let mut col_of: Vec<usize> = (0..n).collect();

        for k in 0..n {
            // full pivot: first nonzero in the remaining submatrix
            let mut pivot = None;
            'search: for r in k..n {
                for c in k..n {
                    if work.get(r, c) != 0 {
                        pivot = Some((r, c));
                        break 'search;
                    }
                }
            }
            let Some((pr, pc)) = pivot else {
                return Err(OracleError::Singular);
            };
            work.swap_rows(k, pr);
            rhs.swap(k, pr);
            work.swap_cols(k, pc);
            col_of.swap(k, pc);

            let inv = f.inv(work.get(k, k));
            for r in k + 1..n {
                let lead = work.get(r, k);
                if lead == 0 {
                    continue;
                }
                let factor = f.mul(lead, inv);
                for j in k..n {
                    let t = f.mul(factor, work.get(k, j));
                    work.set(r, j, f.add(work.get(r, j), t));
                }
                rhs[r] = f.add(rhs[r], f.mul(factor, rhs[k]));
            }
        }

        // back substitution in pivot coordinates
        let mut y = vec![0u8; n];
        for k in (0..n).rev() {
            let mut acc = rhs[k];
            for j in k + 1..n {
                acc = f.add(acc, f.mul(work.get(k, j), y[j]));
            }
            y[k] = f.mul(acc, f.inv(work.get(k, k)));
        }
        let mut x = vec![0u8; n];
        for k in 0..n {
            x[col_of[k]] = y[k];
        }
        Ok(x)
    }

    /// Gauss-Jordan inverse of a square nonsingular matrix.
    pub fn inverse(&self) -> Result<DenseMatrix, OracleError> {
        assert_eq!(self.rows, self.cols, "inverse needs a square matrix");
        let n = self.rows;
        let f = Arc::clone(&self.field);
        let mut work = self.clone();
        let mut inv = DenseMatrix::identity(n, Arc::clone(&f));
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| work.get(r, k) != 0) else {
                return Err(OracleError::Singular);
            };
            work.swap_rows(k, p);
            inv.swap_rows(k, p);
            let d = f.inv(work.get(k, k));
            for c in 0..n {
                work.set(k, c, f.mul(work.get(k, c), d));
                inv.set(k, c, f.mul(inv.get(k, c), d));
            }
            for r in 0..n {
                if r == k {
                    continue;
                }
                let lead = work.get(r, k);
                if lead == 0 {
                    continue;
                }
                for c in 0..n {
                    let t = f.mul(lead, work.get(k, c));
                    work.set(r, c, f.add(work.get(r, c), t));
                    let t = f.mul(lead, inv.get(k, c));
                    inv.set(r, c, f.add(inv.get(r, c), t));
                }
            }
        }
        Ok(inv)
    }
}

/// Result of [`dense_encode`]: the codeword in the original column order and
/// the parity column set that was used.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseEncodeResult {
    pub codeword: Vec<FieldElement>,
    /// Columns solved for the parity part, ascending. Equals `0..m` when the
    /// leading columns are already nonsingular; otherwise the first
    /// independent columns in order.
    pub parity_cols: Vec<usize>,
}

/// Solves `A x^T = b^T` for a square nonsingular sparse `A`.
pub fn dense_solve(a: &SparseMatrix, b: &[FieldElement]) -> Result<Vec<FieldElement>, OracleError> {
    DenseMatrix::from_sparse(a).solve(b)
}

/// Reference encoder: splits the codeword into parity and message parts and
/// solves the parity part by dense elimination. The parity columns are the
/// lexicographically first independent column set, so a matrix whose first
/// `m` columns are nonsingular keeps them.
pub fn dense_encode(h: &SparseMatrix, u: &[FieldElement]) -> Result<DenseEncodeResult, OracleError> {
    let m = h.rows();
    let n = h.cols();
    assert_eq!(u.len(), n - m, "message length must be n - m");
    let f = Arc::clone(h.field());
    let mut work = DenseMatrix::from_sparse(h);

    // reduce to row echelon form, recording pivot columns
    let mut pivot_cols = Vec::with_capacity(m);
    let mut rank = 0;
    for c in 0..n {
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&r| work.get(r, c) != 0) else {
            continue;
        };
        work.swap_rows(rank, p);
        let d = f.inv(work.get(rank, c));
        for j in c..n {
            work.set(rank, j, f.mul(work.get(rank, j), d));
        }
        for r in 0..m {
            if r == rank {
                continue;
            }
            let lead = work.get(r, c);
            if lead == 0 {
                continue;
            }
            for j in c..n {
                let t = f.mul(lead, work.get(rank, j));
                work.set(r, j, f.add(work.get(r, j), t));
            }
        }
        pivot_cols.push(c);
        rank += 1;
    }
    if rank < m {
        return Err(OracleError::RankDeficient { rank, rows: m });
    }

    let mut is_pivot = vec![false; n];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    let mut codeword = vec![0u8; n];
    let message_cols: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    for (c, &val) in message_cols.iter().zip(u) {
        codeword[*c] = val;
    }
    // in RREF, row r reads x[pivot_r] + sum_j R[r, j] x[j] = 0
    for (r, &pc) in pivot_cols.iter().enumerate() {
        let mut acc = 0;
        for &mc in &message_cols {
            acc = f.add(acc, f.mul(work.get(r, mc), codeword[mc]));
        }
        codeword[pc] = acc; // negation is identity in characteristic 2
    }
    Ok(DenseEncodeResult {
        codeword,
        parity_cols: pivot_cols,
    })
}
