//! Associated graphs of weight-2 columns, smallest-cycle detection, and the
//! exact-count solver for cycle matrices.
//!
//! A k x k cycle matrix has nonzero diagonal `gamma_1..gamma_k`, subdiagonal
//! `beta_1..beta_{k-1}` and top-right corner `beta_k`, and nothing else; its
//! associated graph is a single cycle. With the precomputed quantities
//! `eps_i = beta_i * gamma_i^-1`, `ell = 1 + eps_1 * ... * eps_k` and
//! `eta_i = eps_k * eps_1 * ... * eps_{i-1}`, the system `C w^T = b^T` is
//! solved in exactly `3k - 1` multiplications and `2(k - 1)` additions. Over
//! GF(2) every cycle matrix is singular (`ell = 1 + 1 = 0`), which is why
//! cycle extraction is reserved for non-binary fields.

use std::collections::VecDeque;
use std::ops::Range;
use std::sync::Arc;

use thiserror::Error;

use crate::galois::{FieldElement, FieldTable};
use crate::spmat::{CostProfile, SparseMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycleError {
    #[error("matrix window is not in cycle form: {0}")]
    NotACycleMatrix(String),
    #[error("singular cycle matrix: ell = 0")]
    SingularCycle,
}

/// Graph of a window's weight-2 columns: vertices are the window's rows,
/// each weight-2 column is an edge between the two rows it touches.
/// Parallel edges are allowed; self-loops cannot occur because stored
/// coordinates are unique.
#[derive(Debug, Clone)]
pub struct AssociatedGraph {
    vertices: usize,
    /// (endpoint a, endpoint b, source column), in column order.
    edges: Vec<(usize, usize, usize)>,
    adjacency: Vec<Vec<usize>>, // vertex -> edge indices
}

impl AssociatedGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge endpoints and the column the edge came from.
    pub fn edge(&self, e: usize) -> (usize, usize, usize) {
        self.edges[e]
    }

    fn other_end(&self, e: usize, v: usize) -> usize {
        let (a, b, _) = self.edges[e];
        if v == a {
            b
        } else {
            a
        }
    }
}

/// A cycle in an associated graph: `vertices[i]` and `vertices[i+1]` are
/// joined by `edges[i]`, and `edges[k-1]` closes back to `vertices[0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphCycle {
    pub vertices: Vec<usize>,
    /// Edge indices into the graph, aligned with the vertex walk.
    pub edges: Vec<usize>,
}

impl GraphCycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Canonical form: start at the smallest vertex, direction chosen so the
    /// first edge index is the smaller of the two choices. Makes equal
    /// cycles compare equal regardless of where the search found them.
    fn canonicalize(&mut self) {
        let k = self.vertices.len();
        let start = (0..k)
            .min_by_key(|&i| self.vertices[i])
            .expect("cycle is nonempty");
        // two directions around the cycle from `start`
        let fwd_edge = self.edges[start];
        let bwd_edge = self.edges[(start + k - 1) % k];
        let (verts, edges): (Vec<usize>, Vec<usize>) = if fwd_edge <= bwd_edge {
            (
                (0..k).map(|i| self.vertices[(start + i) % k]).collect(),
                (0..k).map(|i| self.edges[(start + i) % k]).collect(),
            )
        } else {
            (
                (0..k).map(|i| self.vertices[(start + k - i) % k]).collect(),
                (0..k)
                    .map(|i| self.edges[(start + k - 1 - i) % k])
                    .collect(),
            )
        };
        self.vertices = verts;
        self.edges = edges;
    }
}

/// Builds the associated graph of the weight-2 columns of a window.
/// Columns of any other weight are skipped. Vertices are window-local row
/// indices; edge labels are absolute column indices.
pub fn build_associated_graph(
    m: &SparseMatrix,
    row_range: Range<usize>,
    col_range: Range<usize>,
) -> AssociatedGraph {
    let vertices = row_range.len();
    let mut edges = Vec::new();
    let mut adjacency = vec![Vec::new(); vertices];
    for c in col_range {
        if let [(a, _), (b, _)] = *m.col_in(c, &row_range) {
            let (va, vb) = (a - row_range.start, b - row_range.start);
            let e = edges.len();
            edges.push((va, vb, c));
            adjacency[va].push(e);
            adjacency[vb].push(e);
        }
    }
    AssociatedGraph {
        vertices,
        edges,
        adjacency,
    }
}

/// One minimal cycle through the BFS tree of `root`, if any.
fn bfs_candidate(g: &AssociatedGraph, root: usize) -> Option<GraphCycle> {
    let n = g.vertices;
    let mut dist = vec![usize::MAX; n];
    let mut parent_edge = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    let mut best: Option<(usize, usize)> = None; // (length, closing edge)

    while let Some(v) = queue.pop_front() {
        for &e in &g.adjacency[v] {
            if e == parent_edge[v] {
                continue;
            }
            let w = g.other_end(e, v);
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                parent_edge[w] = e;
                queue.push_back(w);
            } else {
                // non-tree edge: closes a walk of length dist[v[+dist[w]+1
                let len = dist[v] + dist[w] + 1;
                if best.map_or(true, |(bl, be)| (len, e) < (bl, be)) {
                    best = Some((len, e));
                }
            }
        }
    }

    let (_, closing) = best?;
    let (a, b, _) = g.edges[closing];
    let walk_to_root = |mut v: usize| {
        let mut verts = vec![v];
        let mut edges = Vec::new();
        while v != root {
            let e = parent_edge[v];
            edges.push(e);
            v = g.other_end(e, v);
            verts.push(v);
        }
        (verts, edges)
    };
    let (va, ea) = walk_to_root(a);
    let (vb, eb) = walk_to_root(b);
    // join: a .. root .. b, closed by `closing`
    let mut vertices = va;
    vertices.reverse(); // root .. a
    let mut edges: Vec<usize> = ea.into_iter().rev().collect();
    edges.push(closing);
    for (i, &v) in vb.iter().enumerate() {
        if i + 1 < vb.len() {
            vertices.push(v);
            edges.push(eb[i]);
        }
    }
    // a non-simple walk here would imply a shorter cycle elsewhere; the
    // caller keeps only the globally minimal candidate, which is simple
    let mut cycle = GraphCycle { vertices, edges };
    if !is_simple(&cycle) {
        return None;
    }
    cycle.canonicalize();
    Some(cycle)
}

fn is_simple(c: &GraphCycle) -> bool {
    let mut vs = c.vertices.clone();
    vs.sort_unstable();
    vs.dedup();
    vs.len() == c.vertices.len() && c.vertices.len() == c.edges.len() && c.edges.len() >= 2
}

/// All per-root minimal-cycle candidates, deduplicated and sorted by
/// (length, vertex walk, edge walk). The first entry is the smallest cycle.
pub fn minimal_cycle_candidates(g: &AssociatedGraph) -> Vec<GraphCycle> {
    let mut found: Vec<GraphCycle> = Vec::new();
    for root in 0..g.vertices {
        if let Some(c) = bfs_candidate(g, root) {
            found.push(c);
        }
    }
    found.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.vertices.cmp(&b.vertices))
            .then_with(|| a.edges.cmp(&b.edges))
    });
    found.dedup();
    found
}

/// A smallest cycle of the graph (ties broken deterministically), or `None`
/// for a forest. Length 2 cycles come from parallel edges.
pub fn smallest_cycle(g: &AssociatedGraph) -> Option<GraphCycle> {
    minimal_cycle_candidates(g).into_iter().next()
}

/// Precomputed solve schedule for one cycle matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclePrecomp {
    k: usize,
    gamma: Vec<FieldElement>,
    beta: Vec<FieldElement>,
    eps: Vec<FieldElement>,
    eta: Vec<FieldElement>,
    gamma_inv: Vec<FieldElement>,
    ell: FieldElement,
    ell_inv: FieldElement,
    field: Arc<FieldTable>,
}

impl CyclePrecomp {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ell(&self) -> FieldElement {
        self.ell
    }
}

/// Reads the `(gamma, beta)` sequences off a k x k cycle-matrix window and
/// precomputes the solve schedule. Fails if the window does not have the
/// cycle shape or if `ell = 0` (singular; always the case over GF(2)).
pub fn cycle_precompute(
    m: &SparseMatrix,
    row_range: Range<usize>,
    col_range: Range<usize>,
) -> Result<CyclePrecomp, CycleError> {
    let k = row_range.len();
    if col_range.len() != k || k < 2 {
        return Err(CycleError::NotACycleMatrix(format!(
            "window is {}x{}",
            k,
            col_range.len()
        )));
    }
    let f = Arc::clone(m.field());
    let mut gamma = vec![0u8; k];
    let mut beta = vec![0u8; k];
    for (j, c) in col_range.clone().enumerate() {
        let col = m.col_in(c, &row_range);
        if col.len() != 2 {
            return Err(CycleError::NotACycleMatrix(format!(
                "column {j} has weight {}",
                col.len()
            )));
        }
        for &(r, v) in col {
            let i = r - row_range.start;
            if i == j {
                gamma[j] = v;
            } else if i == (j + 1) % k {
                beta[j] = v;
            } else {
                return Err(CycleError::NotACycleMatrix(format!(
                    "column {j} touches row {i}"
                )));
            }
        }
        if gamma[j] == 0 || beta[j] == 0 {
            return Err(CycleError::NotACycleMatrix(format!(
                "column {j} misses diagonal or subdiagonal"
            )));
        }
    }

    let gamma_inv: Vec<u8> = gamma.iter().map(|&g| f.inv(g)).collect();
    let eps: Vec<u8> = (0..k).map(|i| f.mul(beta[i], gamma_inv[i])).collect();
    let mut ell = 1u8;
    for &e in &eps {
        ell = f.mul(ell, e);
    }
    ell = f.add(1, ell);
    if ell == 0 {
        return Err(CycleError::SingularCycle);
    }
    let ell_inv = f.inv(ell);
    // eta_i = eps_k * eps_1 * ... * eps_{i-1}, for i = 1..k-1 (0-based: 0..k-1)
    let mut eta = vec![0u8; k - 1];
    let mut acc = eps[k - 1];
    for i in 0..k - 1 {
        eta[i] = acc;
        acc = f.mul(acc, eps[i]);
    }

    Ok(CyclePrecomp {
        k,
        gamma,
        beta,
        eps,
        eta,
        gamma_inv,
        ell,
        ell_inv,
        field: f,
    })
}

/// Solves `C w^T = b^T` with the precomputed schedule. Charges exactly
/// `3k - 1` multiplications and `2(k - 1)` additions regardless of `b`.
pub fn cycle_solve(
    pre: &CyclePrecomp,
    b: &[FieldElement],
    profile: &mut CostProfile,
) -> Vec<FieldElement> {
    let k = pre.k;
    assert_eq!(b.len(), k, "dimension mismatch");
    let f = &pre.field;

    let mut z = vec![0u8; k];
    z[0] = b[0];
    for i in 1..k {
        let t = f.mul(pre.eps[i - 1], z[i - 1]);
        profile.add_muls(1);
        z[i] = f.add(b[i], t);
        profile.add_adds(1);
    }
    let y = f.mul(z[k - 1], pre.ell_inv);
    profile.add_muls(1);

    let mut w = vec![0u8; k];
    w[k - 1] = f.mul(pre.gamma_inv[k - 1], y);
    profile.add_muls(1);
    for i in 0..k - 1 {
        let t = f.mul(y, pre.eta[i]);
        profile.add_muls(1);
        // subtraction equals addition in characteristic 2
        let s = f.add(z[i], t);
        profile.add_adds(1);
        w[i] = f.mul(pre.gamma_inv[i], s);
        profile.add_muls(1);
    }
    w
}

/// Expected cycle-solve cost: `(3k - 1, 2(k - 1))`.
pub fn cycle_costs(k: usize) -> (u64, u64) {
    (3 * k as u64 - 1, 2 * (k as u64 - 1))
}
