//! Sparse matrices over GF(2^p), permutations, weight statistics, and
//! instrumented matrix-vector products.
//!
//! Operation counting follows the wt / S bookkeeping used throughout this
//! crate: multiplying a matrix `Z` by a vector costs `wt(Z)` field
//! multiplications (one per stored nonzero, including stored ones) and
//! `S(Z) = wt(Z) - Z(Z)` additions, where `Z(Z)` is the number of rows with
//! at least one nonzero. The first product in a row is assigned, not added.

use std::ops::Range;
use std::sync::Arc;

use thiserror::Error;

use crate::galois::{FieldElement, FieldTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpmatError {
    #[error("entry ({row}, {col}) out of bounds for {rows}x{cols} matrix")]
    EntryOutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate entry at ({0}, {1})")]
    DuplicateEntry(usize, usize),
    #[error("explicit zero stored at ({0}, {1})")]
    ZeroEntry(usize, usize),
    #[error("entry value {value} not a field element of GF({q})")]
    ValueOutOfField { value: u8, q: u16 },
    #[error("permutation size {got} does not match dimension {want}")]
    PermutationSizeMismatch { got: usize, want: usize },
    #[error("map is not a bijection: index {0} appears twice or is out of range")]
    NotABijection(usize),
}

/// Tally of field multiplications and additions actually executed during an
/// encode call. Reset between calls; each concurrent encode owns its own.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct CostProfile {
    pub mul_count: u64,
    pub add_count: u64,
}

impl CostProfile {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add_muls(&mut self, n: u64) {
        self.mul_count += n;
    }

    #[inline]
    pub fn add_adds(&mut self, n: u64) {
        self.add_count += n;
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }

    /// Counts as reported in result tables: multiplications are reported as 0
    /// for the binary field, additions always as counted.
    pub fn reported(&self, q: u16) -> (u64, u64) {
        if q == 2 {
            (0, self.add_count)
        } else {
            (self.mul_count, self.add_count)
        }
    }
}

/// wt / Z / S of a (sub)matrix: nonzero count, rows touched, wt - rows
/// touched. These are exactly the per-matvec multiplication and addition
/// counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightStats {
    pub wt: u64,
    pub z: u64,
    pub s: u64,
}

/// A bijection on `[0, size)`. `map[i]` is the destination of index `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(size: usize) -> Self {
        Self {
            map: (0..size).collect(),
        }
    }

    pub fn from_map(map: Vec<usize>) -> Result<Self, SpmatError> {
        let mut seen = vec![false; map.len()];
        for &d in &map {
            if d >= map.len() || seen[d] {
                return Err(SpmatError::NotABijection(d));
            }
            seen[d] = true;
        }
        Ok(Self { map })
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    /// Destination of index `i`.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &d) in self.map.iter().enumerate() {
            inv[d] = i;
        }
        Self { map: inv }
    }

    /// Composition: apply `self` first, then `next`.
    pub fn then(&self, next: &Permutation) -> Self {
        assert_eq!(self.size(), next.size(), "composition size mismatch");
        Self {
            map: self.map.iter().map(|&d| next.map[d]).collect(),
        }
    }

    /// Scatters `v` so that slot `map[i]` receives `v[i]`.
    pub fn scatter<T: Copy + Default>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.size(), "vector length mismatch");
        let mut out = vec![T::default(); v.len()];
        for (i, &d) in self.map.iter().enumerate() {
            out[d] = v[i];
        }
        out
    }

    /// Gathers: `out[i] = v[map[i]]`. Inverse of [`Permutation::scatter`].
    pub fn gather<T: Copy>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.size(), "vector length mismatch");
        self.map.iter().map(|&d| v[d]).collect()
    }

    /// Embeds a permutation of `[offset, offset + inner.size())` into an
    /// identity on `[0, total)`.
    pub fn embed(inner: &Permutation, offset: usize, total: usize) -> Self {
        assert!(offset + inner.size() <= total);
        let mut map: Vec<usize> = (0..total).collect();
        for (i, &d) in inner.map.iter().enumerate() {
            map[offset + i] = offset + d;
        }
        Self { map }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &d)| i == d)
    }
}

/// Sparse matrix over GF(2^p) with both row-major and column-major entry
/// views. The two views always describe the same entry set; no zeros and no
/// duplicate coordinates are stored.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    nnz: usize,
    // (col, value) per row, sorted by col
    row_entries: Vec<Vec<(usize, FieldElement)>>,
    // (row, value) per col, sorted by row
    col_entries: Vec<Vec<(usize, FieldElement)>>,
    field: Arc<FieldTable>,
}

impl PartialEq for SparseMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.field.p() == other.field.p()
            && self.row_entries == other.row_entries
    }
}

impl SparseMatrix {
    pub fn from_entries(
        rows: usize,
        cols: usize,
        field: Arc<FieldTable>,
        entries: impl IntoIterator<Item = (usize, usize, FieldElement)>,
    ) -> Result<Self, SpmatError> {
        let mut row_entries = vec![Vec::new(); rows];
        let mut nnz = 0;
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(SpmatError::EntryOutOfBounds {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            if v == 0 {
                return Err(SpmatError::ZeroEntry(r, c));
            }
            if v as u16 >= field.q() {
                return Err(SpmatError::ValueOutOfField {
                    value: v,
                    q: field.q(),
                });
            }
            row_entries[r].push((c, v));
            nnz += 1;
        }
        let mut col_entries = vec![Vec::new(); cols];
        for (r, row) in row_entries.iter_mut().enumerate() {
            row.sort_unstable_by_key(|&(c, _)| c);
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(SpmatError::DuplicateEntry(r, w[0].0));
                }
            }
            for &(c, v) in row.iter() {
                col_entries[c].push((r, v));
            }
        }
        Ok(Self {
            rows,
            cols,
            nnz,
            row_entries,
            col_entries,
            field,
        })
    }

    pub fn zero(rows: usize, cols: usize, field: Arc<FieldTable>) -> Self {
        Self {
            rows,
            cols,
            nnz: 0,
            row_entries: vec![Vec::new(); rows],
            col_entries: vec![Vec::new(); cols],
            field,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Total number of stored nonzeros, wt(M).
    pub fn weight(&self) -> usize {
        self.nnz
    }

    pub fn field(&self) -> &Arc<FieldTable> {
        &self.field
    }

    /// Entries `(col, value)` of one row, sorted by column.
    pub fn row(&self, r: usize) -> &[(usize, FieldElement)] {
        &self.row_entries[r]
    }

    /// Entries `(row, value)` of one column, sorted by row.
    pub fn col(&self, c: usize) -> &[(usize, FieldElement)] {
        &self.col_entries[c]
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        match self.row_entries[r].binary_search_by_key(&c, |&(col, _)| col) {
            Ok(i) => self.row_entries[r][i].1,
            Err(_) => 0,
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, FieldElement)> + '_ {
        self.row_entries
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    /// Number of entries of column `c` whose row lies in `row_range`.
    pub fn col_weight_in(&self, c: usize, row_range: &Range<usize>) -> usize {
        let col = &self.col_entries[c];
        let lo = col.partition_point(|&(r, _)| r < row_range.start);
        let hi = col.partition_point(|&(r, _)| r < row_range.end);
        hi - lo
    }

    /// Entries of column `c` restricted to `row_range`.
    pub fn col_in(&self, c: usize, row_range: &Range<usize>) -> &[(usize, FieldElement)] {
        let col = &self.col_entries[c];
        let lo = col.partition_point(|&(r, _)| r < row_range.start);
        let hi = col.partition_point(|&(r, _)| r < row_range.end);
        &col[lo..hi]
    }

    /// Entries of row `r` restricted to `col_range`.
    pub fn row_in(&self, r: usize, col_range: &Range<usize>) -> &[(usize, FieldElement)] {
        let row = &self.row_entries[r];
        let lo = row.partition_point(|&(c, _)| c < col_range.start);
        let hi = row.partition_point(|&(c, _)| c < col_range.end);
        &row[lo..hi]
    }

    /// wt / Z / S over a window.
    pub fn weight_stats(&self, row_range: Range<usize>, col_range: Range<usize>) -> WeightStats {
        assert!(row_range.end <= self.rows && col_range.end <= self.cols);
        let mut wt = 0u64;
        let mut z = 0u64;
        for r in row_range {
            let cnt = self.row_in(r, &col_range).len() as u64;
            wt += cnt;
            if cnt > 0 {
                z += 1;
            }
        }
        WeightStats { wt, z, s: wt - z }
    }

    pub fn is_zero_window(&self, row_range: Range<usize>, col_range: Range<usize>) -> bool {
        self.weight_stats(row_range, col_range).wt == 0
    }

    /// Applies row permutation `p` and column permutation `q`: entry
    /// `(i, j, v)` moves to `(p(i), q(j), v)`.
    pub fn permute(&self, p: &Permutation, q: &Permutation) -> Result<Self, SpmatError> {
        if p.size() != self.rows {
            return Err(SpmatError::PermutationSizeMismatch {
                got: p.size(),
                want: self.rows,
            });
        }
        if q.size() != self.cols {
            return Err(SpmatError::PermutationSizeMismatch {
                got: q.size(),
                want: self.cols,
            });
        }
        let entries = self
            .entries()
            .map(|(r, c, v)| (p.apply(r), q.apply(c), v))
            .collect::<Vec<_>>();
        Self::from_entries(self.rows, self.cols, Arc::clone(&self.field), entries)
    }

    /// Copy of the submatrix given by explicit row and column index lists;
    /// output indices follow list positions.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_pos = vec![usize::MAX; self.cols];
        for (i, &c) in cols.iter().enumerate() {
            col_pos[c] = i;
        }
        let mut entries = Vec::new();
        for (i, &r) in rows.iter().enumerate() {
            for &(c, v) in &self.row_entries[r] {
                if col_pos[c] != usize::MAX {
                    entries.push((i, col_pos[c], v));
                }
            }
        }
        Self::from_entries(rows.len(), cols.len(), Arc::clone(&self.field), entries)
            .expect("submatrix of a valid matrix is valid")
    }

    /// Copy of a contiguous window.
    pub fn window_copy(&self, row_range: Range<usize>, col_range: Range<usize>) -> Self {
        let rows: Vec<usize> = row_range.collect();
        let cols: Vec<usize> = col_range.collect();
        self.submatrix(&rows, &cols)
    }

    /// Counted product of a window with a vector indexed window-locally.
    ///
    /// Charges exactly wt(window) multiplications and S(window) additions:
    /// each row's first product is assigned, later ones are added.
    pub fn window_matvec_counted(
        &self,
        row_range: Range<usize>,
        col_range: Range<usize>,
        x: &[FieldElement],
        profile: &mut CostProfile,
    ) -> Vec<FieldElement> {
        assert_eq!(x.len(), col_range.len(), "dimension mismatch");
        let f = &self.field;
        let mut y = vec![0u8; row_range.len()];
        for (i, r) in row_range.enumerate() {
            let mut acc: Option<FieldElement> = None;
            for &(c, v) in self.row_in(r, &col_range) {
                let prod = f.mul(v, x[c - col_range.start]);
                profile.add_muls(1);
                acc = match acc {
                    None => Some(prod),
                    Some(a) => {
                        profile.add_adds(1);
                        Some(f.add(a, prod))
                    }
                };
            }
            y[i] = acc.unwrap_or(0);
        }
        y
    }

    /// Counted full matrix-vector product.
    pub fn matvec_counted(&self, x: &[FieldElement], profile: &mut CostProfile) -> Vec<FieldElement> {
        self.window_matvec_counted(0..self.rows, 0..self.cols, x, profile)
    }

    /// Uncounted matrix-vector product (checks, oracles).
    pub fn matvec(&self, x: &[FieldElement]) -> Vec<FieldElement> {
        let mut scratch = CostProfile::new();
        self.matvec_counted(x, &mut scratch)
    }

    /// Rank over F_q by elimination on a dense copy of a window.
    pub fn rank_window(&self, row_range: Range<usize>, col_range: Range<usize>) -> usize {
        if self.field.is_binary() {
            self.rank_window_gf2(row_range, col_range)
        } else {
            self.rank_window_gfq(row_range, col_range)
        }
    }

    /// Rank over F_q of the whole matrix.
    pub fn gauss_rank(&self) -> usize {
        self.rank_window(0..self.rows, 0..self.cols)
    }

    fn rank_window_gfq(&self, row_range: Range<usize>, col_range: Range<usize>) -> usize {
        let f = &self.field;
        let ncols = col_range.len();
        let mut dense: Vec<Vec<u8>> = row_range
            .map(|r| {
                let mut row = vec![0u8; ncols];
                for &(c, v) in self.row_in(r, &col_range) {
                    row[c - col_range.start] = v;
                }
                row
            })
            .collect();
        let nrows = dense.len();
        let mut rank = 0;
        for c in 0..ncols {
            if rank == nrows {
                break;
            }
            let Some(pivot) = (rank..nrows).find(|&r| dense[r][c] != 0) else {
                continue;
            };
            dense.swap(rank, pivot);
            let inv = f.inv(dense[rank][c]);
            for r in rank + 1..nrows {
                let lead = dense[r][c];
                if lead == 0 {
                    continue;
                }
                let factor = f.mul(lead, inv);
                // row_r -= factor * row_rank, from c onward
                for j in c..ncols {
                    let t = f.mul(factor, dense[rank][j]);
                    dense[r][j] = f.add(dense[r][j], t);
                }
            }
            rank += 1;
        }
        rank
    }

    fn rank_window_gf2(&self, row_range: Range<usize>, col_range: Range<usize>) -> usize {
        let ncols = col_range.len();
        let words = ncols.div_ceil(64);
        let mut dense: Vec<Vec<u64>> = row_range
            .map(|r| {
                let mut row = vec![0u64; words];
                for &(c, _) in self.row_in(r, &col_range) {
                    let j = c - col_range.start;
                    row[j / 64] |= 1 << (j % 64);
                }
                row
            })
            .collect();
        let nrows = dense.len();
        let mut rank = 0;
        for c in 0..ncols {
            if rank == nrows {
                break;
            }
            let (w, b) = (c / 64, c % 64);
            let Some(pivot) = (rank..nrows).find(|&r| dense[r][w] >> b & 1 == 1) else {
                continue;
            };
            dense.swap(rank, pivot);
            let (head, tail) = dense.split_at_mut(rank + 1);
            let pivot_row = &head[rank];
            for row in tail.iter_mut() {
                if row[w] >> b & 1 == 1 {
                    for (d, s) in row[w..].iter_mut().zip(&pivot_row[w..]) {
                        *d ^= s;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// wt / Z / S of a window; free function mirror of
/// [`SparseMatrix::weight_stats`].
pub fn weight_stats(
    m: &SparseMatrix,
    row_range: Range<usize>,
    col_range: Range<usize>,
) -> WeightStats {
    m.weight_stats(row_range, col_range)
}
