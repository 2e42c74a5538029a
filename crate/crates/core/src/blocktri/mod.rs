//! Block-triangular preprocessing and the block back-substitution encoder.
//!
//! Preprocessing permutes a full-rank parity-check matrix into
//!
//! ```text
//! [ F_1  K_12 ... K_1l | H_I1 ]
//! [      F_2  ... K_2l | H_I2 ]        F_i nonsingular, sum of sizes = m
//! [            ...     | ...  ]
//! [            F_l     | H_Il ]
//! ```
//!
//! where each diagonal block is a diagonal matrix, a cycle matrix, or a
//! small ATM, extracted in that order of preference round by round. The
//! encoder walks the blocks bottom-up: for block i it accumulates
//! `b_i = -(K_{ i,i+1} ... K_{i,l} H_Ii) * tail` as one counted strip
//! product and solves `F_i p_i = b_i` with the block's solver, so the
//! measured operation count equals [`BlockTriangularForm::encoding_costs`]
//! exactly.

mod preprocess;
mod serial;

pub use preprocess::{preprocess, PreprocessError};
pub use serial::{load_form, load_form_file, save_form, save_form_file, FormIoError};

use crate::atm::AtmForm;
use crate::cyclegraph::{cycle_costs, cycle_solve, CyclePrecomp};
use crate::galois::FieldElement;
use crate::lufact::LuForm;
use crate::spmat::{CostProfile, Permutation, SparseMatrix};

/// Which solver backs ATM-shaped diagonal blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMode {
    /// Gap-based solve through `phi^-1`.
    Ru,
    /// LU factorization of the block.
    Lu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Diagonal,
    Cycle,
    Atm,
}

impl BlockKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BlockKind::Diagonal => "diag",
            BlockKind::Cycle => "cycle",
            BlockKind::Atm => "atm",
        }
    }
}

/// Solver payload of one diagonal block.
#[derive(Debug, Clone)]
pub enum BlockSolver {
    Diagonal { inv_diag: Vec<FieldElement> },
    Cycle(CyclePrecomp),
    AtmRu(AtmForm),
    AtmLu(LuForm),
}

/// One diagonal block `F_i`: its position on the diagonal and its solver.
#[derive(Debug, Clone)]
pub struct DiagonalBlock {
    pub offset: usize,
    pub size: usize,
    pub solver: BlockSolver,
}

impl DiagonalBlock {
    pub fn kind(&self) -> BlockKind {
        match self.solver {
            BlockSolver::Diagonal { .. } => BlockKind::Diagonal,
            BlockSolver::Cycle(_) => BlockKind::Cycle,
            BlockSolver::AtmRu(_) | BlockSolver::AtmLu(_) => BlockKind::Atm,
        }
    }

    /// Gap of an ATM block, if this block is one (RU mode).
    pub fn delta(&self) -> Option<usize> {
        match &self.solver {
            BlockSolver::AtmRu(form) => Some(form.delta()),
            _ => None,
        }
    }

    fn solve(
        &self,
        f: &crate::galois::FieldTable,
        b: &[FieldElement],
        profile: &mut CostProfile,
    ) -> Vec<FieldElement> {
        match &self.solver {
            BlockSolver::Diagonal { inv_diag } => b
                .iter()
                .zip(inv_diag)
                .map(|(&bi, &di)| {
                    profile.add_muls(1);
                    f.mul(di, bi)
                })
                .collect(),
            BlockSolver::Cycle(pre) => cycle_solve(pre, b, profile),
            BlockSolver::AtmRu(form) => form.ru_solve(b, profile),
            BlockSolver::AtmLu(form) => form.lu_solve(b, profile),
        }
    }

    fn solver_costs(&self) -> (u64, u64) {
        match &self.solver {
            BlockSolver::Diagonal { .. } => (self.size as u64, 0),
            BlockSolver::Cycle(pre) => cycle_costs(pre.k()),
            BlockSolver::AtmRu(form) => form.ru_costs(),
            BlockSolver::AtmLu(form) => form.lu_costs(),
        }
    }
}

/// The preprocessed encoder: the permuted matrix `H'`, the accumulated
/// permutations with `P H Q = H'`, and the ordered diagonal blocks.
/// Immutable after preprocessing; concurrent encodes each use their own
/// profile and scratch.
#[derive(Debug, Clone)]
pub struct BlockTriangularForm {
    pub(crate) h: SparseMatrix,
    pub(crate) p: Permutation,
    pub(crate) q: Permutation,
    pub(crate) blocks: Vec<DiagonalBlock>,
    pub(crate) solver_mode: SolverMode,
}

impl BlockTriangularForm {
    pub fn h(&self) -> &SparseMatrix {
        &self.h
    }

    pub fn p(&self) -> &Permutation {
        &self.p
    }

    pub fn q(&self) -> &Permutation {
        &self.q
    }

    pub fn blocks(&self) -> &[DiagonalBlock] {
        &self.blocks
    }

    pub fn solver_mode(&self) -> SolverMode {
        self.solver_mode
    }

    pub fn m(&self) -> usize {
        self.h.rows()
    }

    pub fn n(&self) -> usize {
        self.h.cols()
    }

    pub fn message_len(&self) -> usize {
        self.n() - self.m()
    }

    pub fn block_kinds(&self) -> Vec<BlockKind> {
        self.blocks.iter().map(|b| b.kind()).collect()
    }

    /// Sum of the gaps of the ATM blocks.
    pub fn total_delta(&self) -> usize {
        self.blocks.iter().filter_map(|b| b.delta()).sum()
    }

    /// Encodes a message into the codeword in permuted column order:
    /// `x = (p_1, ..., p_l, u)` with `H' x^T = 0`.
    pub fn encode(&self, u: &[FieldElement], profile: &mut CostProfile) -> Vec<FieldElement> {
        let m = self.m();
        let n = self.n();
        assert_eq!(u.len(), n - m, "dimension mismatch");
        let mut x = vec![0u8; n];
        x[m..].copy_from_slice(u);
        for block in self.blocks.iter().rev() {
            let lo = block.offset;
            let hi = lo + block.size;
            // b_i = -(K strip | H_I strip) * known tail, one counted product;
            // negation is identity in characteristic 2
            let b = self
                .h
                .window_matvec_counted(lo..hi, hi..n, &x[hi..], profile);
            let p_i = block.solve(self.h.field(), &b, profile);
            x[lo..hi].copy_from_slice(&p_i);
        }
        x
    }

    /// Encodes and maps the codeword back to the original column order, so
    /// that the input matrix itself checks it: `H x^T = 0`.
    pub fn encode_to_original(
        &self,
        u: &[FieldElement],
        profile: &mut CostProfile,
    ) -> Vec<FieldElement> {
        let x = self.encode(u, profile);
        self.q.gather(&x)
    }

    /// Closed-form encode cost `(mu', alpha')`: per block, the solver cost
    /// plus wt / S of the row strip right of the diagonal block.
    pub fn encoding_costs(&self) -> (u64, u64) {
        let n = self.n();
        let mut mu = 0u64;
        let mut alpha = 0u64;
        for block in &self.blocks {
            let (bm, ba) = block.solver_costs();
            let strip = self
                .h
                .weight_stats(block.offset..block.offset + block.size, block.offset + block.size..n);
            mu += bm + strip.wt;
            alpha += ba + strip.s;
        }
        (mu, alpha)
    }

    /// Weight of the coupling zone between block `i`'s rows and block `j`'s
    /// columns (`K_{i,j}` for i < j).
    pub fn coupling_weight(&self, i: usize, j: usize) -> u64 {
        let bi = &self.blocks[i];
        let bj = &self.blocks[j];
        self.h
            .weight_stats(
                bi.offset..bi.offset + bi.size,
                bj.offset..bj.offset + bj.size,
            )
            .wt
    }

    /// Structural checks: block sizes cover `m`, and everything below each
    /// diagonal block is zero.
    pub fn check_shape(&self) -> bool {
        let m = self.m();
        let total: usize = self.blocks.iter().map(|b| b.size).sum();
        if total != m {
            return false;
        }
        let mut expect = 0;
        for b in &self.blocks {
            if b.offset != expect {
                return false;
            }
            expect += b.size;
            if !self
                .h
                .is_zero_window(b.offset + b.size..m, b.offset..b.offset + b.size)
            {
                return false;
            }
        }
        true
    }

    /// Entry-for-entry check that `P H Q = H'` for the original matrix.
    pub fn verify_permutation(&self, h_orig: &SparseMatrix) -> bool {
        if h_orig.weight() != self.h.weight() {
            return false;
        }
        h_orig
            .entries()
            .all(|(r, c, v)| self.h.get(self.p.apply(r), self.q.apply(c)) == v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegen::{sample_proper_cycle_code, EnsembleConfig};
    use crate::oracle::dense_encode;
    use crate::rng::SplitMix64;
    use crate::testutil::{field, random_full_rank_matrix, random_vector};
    use std::sync::Arc;

    #[test]
    fn identity_matrix_gives_single_diagonal_block() {
        let f = field(3);
        let h = SparseMatrix::from_entries(
            4,
            8,
            Arc::clone(&f),
            (0..4).map(|i| (i, i, (i + 2) as u8)),
        )
        .unwrap();
        let form = preprocess(&h, SolverMode::Ru).unwrap();
        assert_eq!(form.blocks().len(), 1);
        assert_eq!(form.block_kinds(), vec![BlockKind::Diagonal]);
        assert!(form.check_shape());
        assert!(form.verify_permutation(&h));
        // all-diagonal form with empty H_I: costs (m, 0) plus the H_I strip
        let (mu, alpha) = form.encoding_costs();
        let strip = form.h().weight_stats(0..4, 4..8);
        assert_eq!(mu, 4 + strip.wt);
        assert_eq!(alpha, strip.s);
    }

    #[test]
    fn zero_message_encodes_to_zero() {
        let f = field(3);
        let mut rng = SplitMix64::new(8);
        let h = random_full_rank_matrix(12, 24, 0.15, &f, &mut rng);
        let form = preprocess(&h, SolverMode::Ru).unwrap();
        let mut profile = CostProfile::new();
        let x = form.encode(&vec![0; 12], &mut profile);
        assert_eq!(x, vec![0; 24]);
    }

    #[test]
    fn encode_satisfies_parity_in_both_orders() {
        let mut rng = SplitMix64::new(9);
        for p in [1, 3] {
            let f = field(p);
            for _ in 0..8 {
                let h = random_full_rank_matrix(15, 34, 0.12, &f, &mut rng);
                let form = preprocess(&h, SolverMode::Ru).unwrap();
                assert!(form.check_shape());
                assert!(form.verify_permutation(&h));
                let u = random_vector(19, &f, &mut rng);
                let mut profile = CostProfile::new();
                let x = form.encode(&u, &mut profile);
                assert_eq!(form.h().matvec(&x), vec![0; 15]);
                let x_orig = form.encode_to_original(&u, &mut CostProfile::new());
                assert_eq!(h.matvec(&x_orig), vec![0; 15]);
            }
        }
    }

    #[test]
    fn encode_equals_dense_oracle_under_same_split() {
        // H'_P is nonsingular by construction, so the oracle on H' keeps the
        // leading columns as parity and the codewords must agree exactly
        let f = field(3);
        let mut rng = SplitMix64::new(10);
        for _ in 0..5 {
            let h = random_full_rank_matrix(14, 30, 0.14, &f, &mut rng);
            let form = preprocess(&h, SolverMode::Ru).unwrap();
            let u = random_vector(16, &f, &mut rng);
            let x = form.encode(&u, &mut CostProfile::new());
            let res = dense_encode(form.h(), &u).unwrap();
            assert_eq!(res.parity_cols, (0..14).collect::<Vec<_>>());
            assert_eq!(x, res.codeword);
        }
    }

    #[test]
    fn measured_counts_equal_encoding_costs_exactly() {
        let mut rng = SplitMix64::new(11);
        for p in [3u32, 1] {
            let f = field(p);
            for _ in 0..6 {
                let h = random_full_rank_matrix(18, 40, 0.1, &f, &mut rng);
                for mode in [SolverMode::Ru, SolverMode::Lu] {
                    let form = preprocess(&h, mode).unwrap();
                    let costs = form.encoding_costs();
                    let u = random_vector(22, &f, &mut rng);
                    let mut profile = CostProfile::new();
                    form.encode(&u, &mut profile);
                    assert_eq!((profile.mul_count, profile.add_count), costs);
                    if p == 1 {
                        assert_eq!(profile.reported(2).0, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn proper_cycle_code_structure_matches_bidiagonal_form() {
        // cycle first, diagonals after, couplings only between neighbors
        for seed in 0..5 {
            let h = sample_proper_cycle_code(60, 30, 8, seed, 50).unwrap();
            let form = preprocess(&h, SolverMode::Ru).unwrap();
            let kinds = form.block_kinds();
            assert_eq!(kinds[0], BlockKind::Cycle);
            assert!(kinds[1..].iter().all(|&k| k == BlockKind::Diagonal));
            let l = form.blocks().len();
            for i in 1..l {
                assert_ne!(form.coupling_weight(i - 1, i), 0, "K_{{{},{}}} = O", i - 1, i);
            }
            for i in 2..l {
                for j in 0..i - 1 {
                    assert_eq!(form.coupling_weight(j, i), 0, "K_{{{j},{i}}} != O");
                }
            }
            let u = random_vector(30, h.field(), &mut SplitMix64::new(seed));
            let x = form.encode_to_original(&u, &mut CostProfile::new());
            assert_eq!(h.matvec(&x), vec![0; 30]);
        }
    }

    #[test]
    fn binary_input_without_weight_one_columns_uses_only_atm_blocks() {
        // all columns weight 3: no weight-1 columns, and cycle extraction is
        // off over GF(2), so every block comes from the ATM paths
        let f = field(1);
        let mut rng = SplitMix64::new(33);
        let h = loop {
            let mut entries = Vec::new();
            for c in 0..16 {
                let mut picks: Vec<usize> = (0..8).collect();
                rng.shuffle(&mut picks);
                for &r in &picks[..3] {
                    entries.push((r, c, 1u8));
                }
            }
            let h = SparseMatrix::from_entries(8, 16, Arc::clone(&f), entries).unwrap();
            if h.gauss_rank() == 8 {
                break h;
            }
        };
        let form = preprocess(&h, SolverMode::Ru).unwrap();
        assert!(form.check_shape());
        assert!(form
            .block_kinds()
            .iter()
            .all(|&k| k != BlockKind::Cycle), "no cycle blocks over GF(2)");
        let u = random_vector(8, &f, &mut rng);
        let x = form.encode_to_original(&u, &mut CostProfile::new());
        assert_eq!(h.matvec(&x), vec![0; 8]);
    }

    #[test]
    fn rank_deficient_input_is_fatal() {
        let f = field(1);
        let h = SparseMatrix::from_entries(
            2,
            4,
            Arc::clone(&f),
            [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)],
        )
        .unwrap();
        assert!(preprocess(&h, SolverMode::Ru).is_err());
    }

    #[test]
    fn lu_mode_sampled_ensemble_round_trip() {
        let (l, r) = crate::codegen::ensemble_e2();
        let cfg = EnsembleConfig::new(120, 2, l, r, 3);
        let h = crate::codegen::sample_matrix(&cfg).unwrap();
        let form = preprocess(&h, SolverMode::Lu).unwrap();
        assert!(form.check_shape());
        let u = random_vector(form.message_len(), h.field(), &mut SplitMix64::new(4));
        let mut profile = CostProfile::new();
        let x = form.encode_to_original(&u, &mut profile);
        assert_eq!(h.matvec(&x), vec![0; h.rows()]);
        assert_eq!(
            (profile.mul_count, profile.add_count),
            form.encoding_costs()
        );
    }
}
