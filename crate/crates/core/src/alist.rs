//! Extended alist file format for sparse matrices over GF(2^p).
//!
//! Layout (plain text, one logical record per line, single spaces, `\n`
//! terminated):
//!
//! ```text
//! m n q
//! <n column degrees>
//! <m row degrees>
//! <n lines, one per column: "row value row value ..." sorted by row>
//! ```
//!
//! Indices are 0-based. For `q = 2` the value tokens are omitted and a
//! column line is just the sorted row list. A column with no entries is an
//! empty line. Writing is canonical, so write -> read -> write reproduces
//! the file byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::galois::build_field;
use crate::spmat::{SparseMatrix, SpmatError};

#[derive(Debug, Error)]
pub enum AlistError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("field order {0} is not a power of two in 4..=256 (or 2)")]
    BadFieldOrder(u64),
    #[error("matrix error: {0}")]
    Matrix(#[from] SpmatError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> AlistError {
    AlistError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Serializes a matrix in the extended alist format.
pub fn write_alist(m: &SparseMatrix) -> String {
    let q = m.field().q();
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), q);
    let col_degs: Vec<String> = (0..m.cols()).map(|c| m.col(c).len().to_string()).collect();
    let _ = writeln!(out, "{}", col_degs.join(" "));
    let row_degs: Vec<String> = (0..m.rows()).map(|r| m.row(r).len().to_string()).collect();
    let _ = writeln!(out, "{}", row_degs.join(" "));
    for c in 0..m.cols() {
        let mut tokens = Vec::with_capacity(m.col(c).len() * 2);
        for &(r, v) in m.col(c) {
            tokens.push(r.to_string());
            if q > 2 {
                tokens.push(v.to_string());
            }
        }
        let _ = writeln!(out, "{}", tokens.join(" "));
    }
    out
}

/// Parses the extended alist format.
pub fn read_alist(text: &str) -> Result<SparseMatrix, AlistError> {
    let mut lines = text.lines().enumerate();
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let head: Vec<u64> = parse_ints(header, ln + 1)?;
    let [rows, cols, q] = head[..] else {
        return Err(parse_err(ln + 1, "header must be `m n q`"));
    };
    if !(q == 2 || (q.is_power_of_two() && (4..=256).contains(&q))) {
        return Err(AlistError::BadFieldOrder(q));
    }
    let p = q.trailing_zeros();
    let field = Arc::new(build_field(p).expect("q validated to a supported power of two"));
    let (rows, cols) = (rows as usize, cols as usize);

    let (ln, col_line) = lines
        .next()
        .ok_or_else(|| parse_err(2, "missing column degree list"))?;
    let col_degs: Vec<u64> = parse_ints(col_line, ln + 1)?;
    if col_degs.len() != cols {
        return Err(parse_err(ln + 1, format!("expected {cols} column degrees")));
    }
    let (ln, row_line) = lines
        .next()
        .ok_or_else(|| parse_err(3, "missing row degree list"))?;
    let row_degs: Vec<u64> = parse_ints(row_line, ln + 1)?;
    if row_degs.len() != rows {
        return Err(parse_err(ln + 1, format!("expected {rows} row degrees")));
    }

    let mut entries = Vec::new();
    for (c, &deg) in col_degs.iter().enumerate() {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(4 + c, format!("missing line for column {c}")))?;
        let nums: Vec<u64> = parse_ints(line, ln + 1)?;
        let expected = if q == 2 { deg } else { deg * 2 } as usize;
        if nums.len() != expected {
            return Err(parse_err(
                ln + 1,
                format!("column {c}: expected {expected} tokens, found {}", nums.len()),
            ));
        }
        if q == 2 {
            for &r in &nums {
                entries.push((r as usize, c, 1u8));
            }
        } else {
            for pair in nums.chunks(2) {
                let (r, v) = (pair[0], pair[1]);
                if v >= q {
                    return Err(parse_err(ln + 1, format!("value {v} not in GF({q})")));
                }
                entries.push((r as usize, c, v as u8));
            }
        }
    }
    if let Some((ln, line)) = lines.next() {
        if !line.trim().is_empty() {
            return Err(parse_err(ln + 1, "trailing content after matrix"));
        }
    }

    let m = SparseMatrix::from_entries(rows, cols, field, entries)?;
    for (r, &deg) in row_degs.iter().enumerate() {
        if m.row(r).len() as u64 != deg {
            return Err(parse_err(
                3,
                format!(
                    "row {r} degree {} does not match declared {deg}",
                    m.row(r).len()
                ),
            ));
        }
    }
    Ok(m)
}

pub fn write_alist_file(m: &SparseMatrix, path: impl AsRef<Path>) -> Result<(), AlistError> {
    fs::write(path, write_alist(m))?;
    Ok(())
}

pub fn read_alist_file(path: impl AsRef<Path>) -> Result<SparseMatrix, AlistError> {
    read_alist(&fs::read_to_string(path)?)
}

fn parse_ints(line: &str, lineno: usize) -> Result<Vec<u64>, AlistError> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| parse_err(lineno, format!("bad integer `{t}`")))
        })
        .collect()
}
