//! Encoders for binary and non-binary LDPC codes built on block
//! triangulation of the parity-check matrix.
//!
//! The preprocessing stage permutes the rows and columns of a full-rank
//! parity-check matrix into a block-triangular form whose diagonal blocks
//! are diagonal matrices, cycle matrices, or small approximate-triangular
//! (ATM) blocks; the encoding stage then solves for the parity symbols by
//! block back-substitution. Richardson-Urbanke (ATM + dense gap solve) and
//! LU-factorization encoders are included as baselines, and every encoder
//! is instrumented with exact field-operation counters that match the
//! closed-form cost expressions.
//!
//! Modules:
//! - [`galois`]: GF(2^p) table arithmetic, p in 1..=8.
//! - [`spmat`]: sparse matrices, permutations, counted products, rank.
//! - [`alist`]: extended alist matrix file format.
//! - [`codegen`]: random irregular and cycle-code ensembles.
//! - [`oracle`]: dense reference solver / encoder (ground truth in tests).
//! - [`atm`]: approximate triangulation and the gap-based solver.
//! - [`lufact`]: sparse LU factorization with Markowitz pivoting.
//! - [`sbbd`]: singly bordered block-diagonalization heuristic.
//! - [`cyclegraph`]: associated graphs, smallest cycles, cycle-matrix solver.
//! - [`blocktri`]: the block-triangular preprocessing and encoder.
//! - [`pipeline`]: ready-made RU / LU / block-triangular encoding pipelines.

pub mod alist;
pub mod atm;
pub mod blocktri;
pub mod codegen;
pub mod cyclegraph;
pub mod galois;
pub mod lufact;
pub mod oracle;
pub mod pipeline;
pub mod rng;
pub mod sbbd;
pub mod spmat;

#[cfg(test)]
pub(crate) mod testutil;

pub use galois::{build_field, FieldElement, FieldTable};
pub use spmat::{CostProfile, Permutation, SparseMatrix, WeightStats};
