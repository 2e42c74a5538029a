//! Random irregular LDPC parity-check matrices sampled from edge-perspective
//! degree-distribution pairs, plus proper cycle-code ensembles.
//!
//! Sampling is configuration-model socket matching: node counts per degree
//! come from largest-remainder quantization of the edge fractions, check
//! sockets are shuffled with the crate's fixed splitmix64 generator, and
//! duplicate (row, col) pairs are repaired by local re-pairing. A draw whose
//! pairing cannot be repaired or whose rank falls short of `m` is thrown
//! away and resampled wholesale, up to `max_attempts` times. Everything is
//! a pure function of the config, so one seed reproduces one matrix.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::galois::{build_field, FieldTable};
use crate::rng::{derive_seed, SplitMix64};
use crate::spmat::SparseMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("invalid degree distribution: {0}")]
    BadDistribution(String),
    #[error("derived check count m={m} is degenerate for n={n}")]
    DegenerateRate { m: i64, n: usize },
    #[error("degree {degree} exceeds the {axis} dimension {limit}")]
    DegreeTooLarge {
        degree: usize,
        axis: &'static str,
        limit: usize,
    },
    #[error("no full-rank matrix found in {attempts} attempts")]
    RankUnreachable { attempts: u64 },
    #[error("socket pairing failed (unresolvable duplicate edges)")]
    PairingFailed,
    #[error("cycle codes require a non-binary field")]
    BinaryCycleCode,
    #[error("cycle code needs n > m >= 2, got n={n}, m={m}")]
    BadCycleShape { n: usize, m: usize },
    #[error("no connected full-rank cycle code found in {attempts} attempts")]
    CycleUnreachable { attempts: u64 },
}

/// Edge-perspective degree distribution: pairs `(degree, edge fraction)`.
///
/// Published coefficient lists are rounded, so the sum check uses a 1e-4
/// tolerance; fractions are renormalized internally.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pairs: Vec<(usize, f64)>,
}

impl DegreeDistribution {
    pub fn new(pairs: impl Into<Vec<(usize, f64)>>) -> Result<Self, EnsembleError> {
        let mut pairs: Vec<(usize, f64)> = pairs.into();
        if pairs.is_empty() {
            return Err(EnsembleError::BadDistribution("empty".into()));
        }
        pairs.sort_unstable_by_key(|&(d, _)| d);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(EnsembleError::BadDistribution(format!(
                    "degree {} listed twice",
                    w[0].0
                )));
            }
        }
        let mut sum = 0.0;
        for &(d, frac) in &pairs {
            if d < 1 {
                return Err(EnsembleError::BadDistribution("degree below 1".into()));
            }
            if frac <= 0.0 || !frac.is_finite() {
                return Err(EnsembleError::BadDistribution(format!(
                    "fraction {frac} for degree {d}"
                )));
            }
            sum += frac;
        }
        if (sum - 1.0).abs() > 1e-4 {
            return Err(EnsembleError::BadDistribution(format!(
                "fractions sum to {sum}"
            )));
        }
        for p in pairs.iter_mut() {
            p.1 /= sum;
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(usize, f64)] {
        &self.pairs
    }

    /// Integral of the distribution polynomial: sum of fraction/degree.
    pub fn integral(&self) -> f64 {
        self.pairs.iter().map(|&(d, frac)| frac / d as f64).sum()
    }

    /// Node-perspective fractions derived from the edge fractions.
    pub fn node_fractions(&self) -> Vec<(usize, f64)> {
        let total = self.integral();
        self.pairs
            .iter()
            .map(|&(d, frac)| (d, frac / d as f64 / total))
            .collect()
    }

    /// Largest-remainder quantization of node fractions to `total` nodes.
    /// Each class differs from its exact share by less than one node.
    pub fn quantize_nodes(&self, total: usize) -> Vec<(usize, usize)> {
        let fractions = self.node_fractions();
        let mut counts: Vec<(usize, usize, f64)> = fractions
            .iter()
            .map(|&(d, nu)| {
                let exact = nu * total as f64;
                (d, exact.floor() as usize, exact - exact.floor())
            })
            .collect();
        let assigned: usize = counts.iter().map(|c| c.1).sum();
        let mut leftover = total - assigned;
        // largest fractional part first, ties to the smaller degree
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&a, &b| {
            counts[b]
                .2
                .partial_cmp(&counts[a].2)
                .unwrap()
                .then(counts[a].0.cmp(&counts[b].0))
        });
        for idx in order {
            if leftover == 0 {
                break;
            }
            counts[idx].1 += 1;
            leftover -= 1;
        }
        counts.into_iter().map(|(d, c, _)| (d, c)).collect()
    }
}

/// The non-binary benchmark ensemble: the irregular GF(8) degree
/// distribution pair used by the complexity comparison experiments.
pub fn ensemble_e8() -> (DegreeDistribution, DegreeDistribution) {
    let lambda = DegreeDistribution::new(vec![
        (2, 0.49978),
        (3, 0.17434),
        (4, 0.29967),
        (5, 0.02622),
    ])
    .expect("built-in distribution");
    let rho = DegreeDistribution::new(vec![(5, 0.81315), (6, 0.18685)]).expect("built-in");
    (lambda, rho)
}

/// The binary benchmark ensemble.
pub fn ensemble_e2() -> (DegreeDistribution, DegreeDistribution) {
    let lambda = DegreeDistribution::new(vec![(2, 0.0739196), (3, 0.657891), (13, 0.268189)])
        .expect("built-in distribution");
    let rho = DegreeDistribution::new(vec![(5, 0.390753), (6, 0.361589), (10, 0.247658)])
        .expect("built-in");
    (lambda, rho)
}

/// Number of check rows implied by the distributions:
/// `m = round(n * int(rho) / int(lambda))`.
pub fn derive_m(
    n: usize,
    lambda: &DegreeDistribution,
    rho: &DegreeDistribution,
) -> Result<usize, EnsembleError> {
    let m = (n as f64 * rho.integral() / lambda.integral()).round() as i64;
    if m <= 0 || m >= n as i64 {
        return Err(EnsembleError::DegenerateRate { m, n });
    }
    Ok(m as usize)
}

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub n: usize,
    pub q: u16,
    pub lambda: DegreeDistribution,
    pub rho: DegreeDistribution,
    pub seed: u64,
    pub max_attempts: u64,
}

impl EnsembleConfig {
    pub fn new(
        n: usize,
        q: u16,
        lambda: DegreeDistribution,
        rho: DegreeDistribution,
        seed: u64,
    ) -> Self {
        Self {
            n,
            q,
            lambda,
            rho,
            seed,
            max_attempts: 200,
        }
    }
}

/// Expands quantized (degree, count) classes into a per-node degree list,
/// low degrees first.
fn expand_degrees(classes: &[(usize, usize)]) -> Vec<usize> {
    let mut out = Vec::new();
    for &(d, c) in classes {
        out.extend(std::iter::repeat(d).take(c));
    }
    out
}

/// Makes the check-side socket total match the variable side by bumping row
/// degrees up or down one at a time, round-robin over the rows.
fn reconcile_row_degrees(row_degs: &mut [usize], target_edges: usize, n_cols: usize) {
    let mut have: usize = row_degs.iter().sum();
    let mut i = 0;
    while have < target_edges {
        if row_degs[i] < n_cols {
            row_degs[i] += 1;
            have += 1;
        }
        i = (i + 1) % row_degs.len();
    }
    while have > target_edges {
        if row_degs[i] > 1 {
            row_degs[i] -= 1;
            have -= 1;
        }
        i = (i + 1) % row_degs.len();
    }
}

/// One configuration-model draw for explicit degree sequences. Duplicate
/// (row, col) pairs are repaired by swapping check sockets; gives up after a
/// bounded number of passes.
pub fn pair_degree_sequences(
    col_degs: &[usize],
    row_degs: &[usize],
    field: &Arc<FieldTable>,
    rng: &mut SplitMix64,
) -> Result<SparseMatrix, EnsembleError> {
    let n = col_degs.len();
    let m = row_degs.len();
    let edges: usize = col_degs.iter().sum();
    assert_eq!(
        edges,
        row_degs.iter().sum::<usize>(),
        "socket totals must match"
    );

    let mut var_sockets = Vec::with_capacity(edges);
    for (c, &d) in col_degs.iter().enumerate() {
        var_sockets.extend(std::iter::repeat(c).take(d));
    }
    let mut chk_sockets = Vec::with_capacity(edges);
    for (r, &d) in row_degs.iter().enumerate() {
        chk_sockets.extend(std::iter::repeat(r).take(d));
    }
    rng.shuffle(&mut chk_sockets);

    let mut pair_count: HashMap<(usize, usize), u32> = HashMap::with_capacity(edges);
    for i in 0..edges {
        *pair_count
            .entry((var_sockets[i], chk_sockets[i]))
            .or_insert(0) += 1;
    }

    for _pass in 0..100 {
        // positions beyond the first occurrence of their pair
        let mut first = HashMap::with_capacity(edges);
        let mut dups = Vec::new();
        for i in 0..edges {
            if first.insert((var_sockets[i], chk_sockets[i]), i).is_some() {
                dups.push(i);
            }
        }
        if dups.is_empty() {
            let q = field.q() as u64;
            let entries: Vec<(usize, usize, u8)> = var_sockets
                .iter()
                .zip(&chk_sockets)
                .map(|(&c, &r)| (r, c, (1 + rng.next_below(q - 1)) as u8))
                .collect();
            return SparseMatrix::from_entries(m, n, Arc::clone(field), entries)
                .map_err(|_| EnsembleError::PairingFailed);
        }
        for &i in &dups {
            let (ci, ri) = (var_sockets[i], chk_sockets[i]);
            if pair_count[&(ci, ri)] < 2 {
                continue; // resolved by an earlier swap in this pass
            }
            for _ in 0..64 {
                let j = rng.next_below(edges as u64) as usize;
                let (cj, rj) = (var_sockets[j], chk_sockets[j]);
                if j == i || (ci == cj && ri == rj) {
                    continue;
                }
                let new_a = (ci, rj);
                let new_b = (cj, ri);
                if pair_count.get(&new_a).copied().unwrap_or(0) > 0
                    || pair_count.get(&new_b).copied().unwrap_or(0) > 0
                {
                    continue;
                }
                *pair_count.get_mut(&(ci, ri)).unwrap() -= 1;
                *pair_count.get_mut(&(cj, rj)).unwrap() -= 1;
                *pair_count.entry(new_a).or_insert(0) += 1;
                *pair_count.entry(new_b).or_insert(0) += 1;
                chk_sockets.swap(i, j);
                break;
            }
        }
    }
    Err(EnsembleError::PairingFailed)
}

/// Samples one full-rank parity-check matrix from the ensemble.
pub fn sample_matrix(cfg: &EnsembleConfig) -> Result<SparseMatrix, EnsembleError> {
    let m = derive_m(cfg.n, &cfg.lambda, &cfg.rho)?;
    let field = Arc::new(build_field(cfg.q.trailing_zeros()).map_err(|e| {
        EnsembleError::BadDistribution(format!("field order {}: {e}", cfg.q))
    })?);

    let col_degs = expand_degrees(&cfg.lambda.quantize_nodes(cfg.n));
    let mut row_degs = expand_degrees(&cfg.rho.quantize_nodes(m));
    for &d in &col_degs {
        if d > m {
            return Err(EnsembleError::DegreeTooLarge {
                degree: d,
                axis: "row",
                limit: m,
            });
        }
    }
    for &d in &row_degs {
        if d > cfg.n {
            return Err(EnsembleError::DegreeTooLarge {
                degree: d,
                axis: "column",
                limit: cfg.n,
            });
        }
    }
    let target_edges: usize = col_degs.iter().sum();
    reconcile_row_degrees(&mut row_degs, target_edges, cfg.n);

    for attempt in 0..cfg.max_attempts {
        let mut rng = SplitMix64::new(derive_seed(cfg.seed, attempt));
        let Ok(h) = pair_degree_sequences(&col_degs, &row_degs, &field, &mut rng) else {
            continue;
        };
        if h.gauss_rank() == m {
            return Ok(h);
        }
    }
    Err(EnsembleError::RankUnreachable {
        attempts: cfg.max_attempts,
    })
}

/// Samples a proper (connected) cycle code: every column has weight 2, the
/// associated graph is connected, and the matrix has full rank `m`.
pub fn sample_proper_cycle_code(
    n: usize,
    m: usize,
    q: u16,
    seed: u64,
    max_attempts: u64,
) -> Result<SparseMatrix, EnsembleError> {
    if q <= 2 {
        return Err(EnsembleError::BinaryCycleCode);
    }
    if m < 2 || n <= m {
        return Err(EnsembleError::BadCycleShape { n, m });
    }
    let field = Arc::new(build_field(q.trailing_zeros()).map_err(|e| {
        EnsembleError::BadDistribution(format!("field order {q}: {e}"))
    })?);

    for attempt in 0..max_attempts {
        let mut rng = SplitMix64::new(derive_seed(seed, attempt));
        // a random spanning tree guarantees connectivity; extra edges may be
        // parallel but never self-loops
        let mut edge_ends: Vec<(usize, usize)> = (1..m)
            .map(|v| (rng.next_below(v as u64) as usize, v))
            .collect();
        for _ in 0..n - (m - 1) {
            let u = rng.next_below(m as u64) as usize;
            let mut v = rng.next_below(m as u64 - 1) as usize;
            if v >= u {
                v += 1;
            }
            edge_ends.push((u, v));
        }
        rng.shuffle(&mut edge_ends);

        let mut entries = Vec::with_capacity(2 * n);
        for (c, &(u, v)) in edge_ends.iter().enumerate() {
            entries.push((u, c, (1 + rng.next_below(q as u64 - 1)) as u8));
            entries.push((v, c, (1 + rng.next_below(q as u64 - 1)) as u8));
        }
        let h = SparseMatrix::from_entries(m, n, Arc::clone(&field), entries)
            .expect("cycle code entries are valid by construction");
        debug_assert!(weight_two_graph_connected(&h));
        if h.gauss_rank() == m {
            return Ok(h);
        }
    }
    Err(EnsembleError::CycleUnreachable {
        attempts: max_attempts,
    })
}

/// Connectivity of the graph whose vertices are rows and whose edges are the
/// weight-2 columns.
pub fn weight_two_graph_connected(h: &SparseMatrix) -> bool {
    let m = h.rows();
    let mut adj = vec![Vec::new(); m];
    for c in 0..h.cols() {
        if let [(a, _), (b, _)] = *h.col(c) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = vec![false; m];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == m
}
