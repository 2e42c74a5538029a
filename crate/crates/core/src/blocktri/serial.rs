//! Versioned JSON container for [`BlockTriangularForm`].
//!
//! The file stores the logical content: field degree, dimensions, the two
//! permutations, the entries of `H'`, the solver mode, and the block list
//! (kind, offset, size, gap). Solver payloads (inverses, factorizations,
//! cycle schedules) are rebuilt deterministically from `H'` on load, so a
//! loaded form encodes bit-identically to the saved one.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atm::atm_form_from_square;
use crate::cyclegraph::cycle_precompute;
use crate::galois::build_field;
use crate::lufact::lu_factorize;
use crate::spmat::{Permutation, SparseMatrix};

use super::{BlockKind, BlockSolver, BlockTriangularForm, DiagonalBlock, SolverMode};

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormIoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported container version {0}")]
    Version(u32),
    #[error("invalid form data: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
struct FormDto {
    version: u32,
    field_degree: u32,
    m: usize,
    n: usize,
    solver_mode: String,
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
    entries: Vec<(u32, u32, u8)>,
    blocks: Vec<BlockDto>,
}

#[derive(Serialize, Deserialize)]
struct BlockDto {
    kind: String,
    offset: usize,
    size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<usize>,
}

/// Serializes a form to the versioned JSON container.
pub fn save_form(form: &BlockTriangularForm) -> String {
    let dto = FormDto {
        version: FORMAT_VERSION,
        field_degree: form.h.field().p(),
        m: form.m(),
        n: form.n(),
        solver_mode: match form.solver_mode {
            SolverMode::Ru => "ru".into(),
            SolverMode::Lu => "lu".into(),
        },
        row_perm: form.p.map().to_vec(),
        col_perm: form.q.map().to_vec(),
        entries: form
            .h
            .entries()
            .map(|(r, c, v)| (r as u32, c as u32, v))
            .collect(),
        blocks: form
            .blocks
            .iter()
            .map(|b| BlockDto {
                kind: b.kind().as_str().into(),
                offset: b.offset,
                size: b.size,
                delta: match &b.solver {
                    BlockSolver::AtmRu(f) => Some(f.delta()),
                    BlockSolver::AtmLu(_) => Some(0),
                    _ => None,
                },
            })
            .collect(),
    };
    serde_json::to_string(&dto).expect("form serializes")
}

/// Parses the container and rebuilds the solver payloads.
pub fn load_form(text: &str) -> Result<BlockTriangularForm, FormIoError> {
    let dto: FormDto = serde_json::from_str(text)?;
    if dto.version != FORMAT_VERSION {
        return Err(FormIoError::Version(dto.version));
    }
    let field = Arc::new(
        build_field(dto.field_degree).map_err(|e| FormIoError::Invalid(e.to_string()))?,
    );
    let h = SparseMatrix::from_entries(
        dto.m,
        dto.n,
        field.clone(),
        dto.entries
            .iter()
            .map(|&(r, c, v)| (r as usize, c as usize, v)),
    )
    .map_err(|e| FormIoError::Invalid(e.to_string()))?;
    let p = Permutation::from_map(dto.row_perm).map_err(|e| FormIoError::Invalid(e.to_string()))?;
    let q = Permutation::from_map(dto.col_perm).map_err(|e| FormIoError::Invalid(e.to_string()))?;
    if p.size() != dto.m || q.size() != dto.n {
        return Err(FormIoError::Invalid("permutation sizes mismatch".into()));
    }
    let solver_mode = match dto.solver_mode.as_str() {
        "ru" => SolverMode::Ru,
        "lu" => SolverMode::Lu,
        other => return Err(FormIoError::Invalid(format!("solver mode `{other}`"))),
    };

    let mut blocks = Vec::with_capacity(dto.blocks.len());
    let mut expect = 0usize;
    for b in &dto.blocks {
        if b.offset != expect || b.size == 0 || b.offset + b.size > dto.m {
            return Err(FormIoError::Invalid(format!(
                "block at offset {} size {} is out of place",
                b.offset, b.size
            )));
        }
        expect += b.size;
        let rows = b.offset..b.offset + b.size;
        let cols = b.offset..b.offset + b.size;
        let solver = match b.kind.as_str() {
            k if k == BlockKind::Diagonal.as_str() => {
                let mut inv_diag = Vec::with_capacity(b.size);
                for i in 0..b.size {
                    let v = h.get(b.offset + i, b.offset + i);
                    inv_diag.push(field.checked_inv(v).ok_or_else(|| {
                        FormIoError::Invalid(format!("zero diagonal at {}", b.offset + i))
                    })?);
                }
                BlockSolver::Diagonal { inv_diag }
            }
            k if k == BlockKind::Cycle.as_str() => BlockSolver::Cycle(
                cycle_precompute(&h, rows, cols)
                    .map_err(|e| FormIoError::Invalid(e.to_string()))?,
            ),
            k if k == BlockKind::Atm.as_str() => {
                let a = h.window_copy(rows, cols);
                match solver_mode {
                    SolverMode::Ru => {
                        let delta = b.delta.ok_or_else(|| {
                            FormIoError::Invalid("atm block without delta".into())
                        })?;
                        BlockSolver::AtmRu(
                            atm_form_from_square(a, delta)
                                .map_err(|e| FormIoError::Invalid(e.to_string()))?,
                        )
                    }
                    SolverMode::Lu => BlockSolver::AtmLu(
                        lu_factorize(&a).map_err(|e| FormIoError::Invalid(e.to_string()))?,
                    ),
                }
            }
            other => return Err(FormIoError::Invalid(format!("block kind `{other}`"))),
        };
        blocks.push(DiagonalBlock {
            offset: b.offset,
            size: b.size,
            solver,
        });
    }
    if expect != dto.m {
        return Err(FormIoError::Invalid(format!(
            "blocks cover {expect} of {} rows",
            dto.m
        )));
    }

    let form = BlockTriangularForm {
        h,
        p,
        q,
        blocks,
        solver_mode,
    };
    if !form.check_shape() {
        return Err(FormIoError::Invalid(
            "matrix is not block triangular for the declared blocks".into(),
        ));
    }
    Ok(form)
}

pub fn save_form_file(
    form: &BlockTriangularForm,
    path: impl AsRef<Path>,
) -> Result<(), FormIoError> {
    fs::write(path, save_form(form))?;
    Ok(())
}

pub fn load_form_file(path: impl AsRef<Path>) -> Result<BlockTriangularForm, FormIoError> {
    load_form(&fs::read_to_string(path)?)
}
