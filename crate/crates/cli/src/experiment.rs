//! Experiment runner and report rendering.
//!
//! One trial = one sampled matrix, one random message, one instrumented
//! encode per selected algorithm. Trials are deterministic in the base
//! seed: every trial derives its own generator, so runs are reproducible
//! and trials can execute in parallel. Reported multiplication counts are 0
//! over GF(2); additions are reported as counted.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use ldpc_blocktri::alist::read_alist_file;
use ldpc_blocktri::codegen::{
    ensemble_e2, ensemble_e8, sample_matrix, sample_proper_cycle_code, EnsembleConfig,
};
use ldpc_blocktri::blocktri::SolverMode;
use ldpc_blocktri::pipeline::{Pipeline, PipelineKind};
use ldpc_blocktri::rng::{derive_seed, SplitMix64};
use ldpc_blocktri::{CostProfile, SparseMatrix};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("matrix file error: {0}")]
    Alist(#[from] ldpc_blocktri::alist::AlistError),
    #[error("cycle ensembles need a non-binary field (q > 2)")]
    BinaryCycleEnsemble,
    #[error("cycle ensembles need even n >= 4, got {0}")]
    BadCycleLength(usize),
    #[error("no algorithms selected")]
    NoAlgorithms,
    #[error("no code lengths selected")]
    NoLengths,
}

/// Where the parity-check matrices come from.
#[derive(Debug, Clone)]
pub enum EnsembleSpec {
    /// Built-in irregular GF(8) benchmark ensemble.
    E8,
    /// Built-in irregular binary benchmark ensemble.
    E2,
    /// Proper cycle codes of rate 1/2 (`m = n/2`).
    Cycle,
    /// A fixed matrix from an extended-alist file; trials vary the message.
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleSpec,
    pub n_list: Vec<usize>,
    /// Field order; `None` picks the ensemble default (8 for e8/cycle, 2
    /// for e2, the file's own order for files).
    pub q: Option<u16>,
    pub trials: u64,
    pub seed: u64,
    pub algos: Vec<PipelineKind>,
    /// Solver behind the `blocktri` algorithm entry; `blocktri-lu` always
    /// uses LU.
    pub atm_solver: SolverMode,
    pub verify: bool,
}

impl ExperimentConfig {
    fn resolve_q(&self) -> u16 {
        self.q.unwrap_or(match self.ensemble {
            EnsembleSpec::E8 | EnsembleSpec::Cycle => 8,
            EnsembleSpec::E2 => 2,
            EnsembleSpec::File(_) => 0, // replaced by the file's order
        })
    }
}

/// One (algorithm, trial) measurement.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub algorithm: PipelineKind,
    pub n: usize,
    pub trial: u64,
    pub mul: u64,
    pub add: u64,
    pub preprocess_ms: f64,
    pub delta: usize,
    pub blocks: usize,
    pub kinds: String,
    /// `None` when verification was off.
    pub verified: Option<bool>,
    /// Sampling or preprocessing failure; such records carry no counts and
    /// are excluded from averages.
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub q: u16,
    pub records: Vec<TrialRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Mul,
    Add,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Mul => "mul",
            Metric::Add => "add",
        }
    }
}

/// Averaged complexity of one (algorithm, n) cell over successful trials.
#[derive(Debug, Clone)]
pub struct AverageRow {
    pub algorithm: PipelineKind,
    pub n: usize,
    pub trials: u64,
    pub mul: f64,
    pub add: f64,
    pub preprocess_ms: f64,
    pub delta: f64,
    pub blocks: f64,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, ExperimentError> {
    if cfg.algos.is_empty() {
        return Err(ExperimentError::NoAlgorithms);
    }
    let file_matrix = match &cfg.ensemble {
        EnsembleSpec::File(path) => Some(read_alist_file(path)?),
        _ => None,
    };
    let n_list: Vec<usize> = match &file_matrix {
        Some(h) => vec![h.cols()],
        None => cfg.n_list.clone(),
    };
    if n_list.is_empty() {
        return Err(ExperimentError::NoLengths);
    }
    let q = match &file_matrix {
        Some(h) => h.field().q(),
        None => cfg.resolve_q(),
    };
    if matches!(cfg.ensemble, EnsembleSpec::Cycle) {
        if q <= 2 {
            return Err(ExperimentError::BinaryCycleEnsemble);
        }
        if let Some(&n) = n_list.iter().find(|&&n| n < 4 || n % 2 != 0) {
            return Err(ExperimentError::BadCycleLength(n));
        }
    }

    let mut records = Vec::new();
    for &n in &n_list {
        let mut batch: Vec<Vec<TrialRecord>> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| run_trial(cfg, &file_matrix, n, q, trial))
            .collect();
        for trial_records in batch.drain(..) {
            records.extend(trial_records);
        }
    }
    Ok(Report { q, records })
}

fn run_trial(
    cfg: &ExperimentConfig,
    file_matrix: &Option<SparseMatrix>,
    n: usize,
    q: u16,
    trial: u64,
) -> Vec<TrialRecord> {
    let trial_seed = derive_seed(derive_seed(cfg.seed, n as u64), trial);
    let failure = |msg: String| {
        cfg.algos
            .iter()
            .map(|&algorithm| TrialRecord {
                algorithm,
                n,
                trial,
                mul: 0,
                add: 0,
                preprocess_ms: 0.0,
                delta: 0,
                blocks: 0,
                kinds: String::new(),
                verified: None,
                error: Some(msg.clone()),
            })
            .collect::<Vec<_>>()
    };

    let h = match file_matrix {
        Some(h) => h.clone(),
        None => {
            let sampled = match &cfg.ensemble {
                EnsembleSpec::E8 => {
                    let (lambda, rho) = ensemble_e8();
                    let mut ecfg = EnsembleConfig::new(n, q, lambda, rho, trial_seed);
                    ecfg.max_attempts = 200;
                    sample_matrix(&ecfg)
                }
                EnsembleSpec::E2 => {
                    let (lambda, rho) = ensemble_e2();
                    let mut ecfg = EnsembleConfig::new(n, q, lambda, rho, trial_seed);
                    ecfg.max_attempts = 200;
                    sample_matrix(&ecfg)
                }
                EnsembleSpec::Cycle => sample_proper_cycle_code(n, n / 2, q, trial_seed, 200),
                EnsembleSpec::File(_) => unreachable!("file matrix handled above"),
            };
            match sampled {
                Ok(h) => h,
                Err(e) => return failure(format!("sampling: {e}")),
            }
        }
    };

    let mut msg_rng = SplitMix64::new(derive_seed(trial_seed, 0x6d65_7373));
    let u: Vec<u8> = (0..h.cols() - h.rows())
        .map(|_| msg_rng.next_below(q as u64) as u8)
        .collect();

    let mut out = Vec::with_capacity(cfg.algos.len());
    for &algorithm in &cfg.algos {
        let kind = match (algorithm, cfg.atm_solver) {
            (PipelineKind::BlockTri, SolverMode::Lu) => PipelineKind::BlockTriLu,
            (k, _) => k,
        };
        let started = Instant::now();
        let pipeline = match Pipeline::build(kind, &h) {
            Ok(p) => p,
            Err(e) => {
                out.extend(failure(format!("preprocess({}): {e}", algorithm.as_str())));
                continue;
            }
        };
        let preprocess_ms = started.elapsed().as_secs_f64() * 1e3;
        let mut profile = CostProfile::new();
        let x = pipeline.encode_to_original(&u, &mut profile);
        let (mul, add) = profile.reported(q);
        let verified = cfg.verify.then(|| {
            h.matvec(&x).iter().all(|&s| s == 0)
                && (profile.mul_count, profile.add_count) == pipeline.predicted_costs()
        });
        let meta = pipeline.meta();
        out.push(TrialRecord {
            algorithm,
            n,
            trial,
            mul,
            add,
            preprocess_ms,
            delta: meta.delta,
            blocks: meta.blocks,
            kinds: meta.kinds,
            verified,
            error: None,
        });
    }
    out
}

impl Report {
    pub fn any_verification_failure(&self) -> bool {
        self.records
            .iter()
            .any(|r| r.verified == Some(false) || r.error.is_some())
    }

    /// Averages over the successful trials of each (algorithm, n) cell, in
    /// first-appearance order.
    pub fn averages(&self) -> Vec<AverageRow> {
        let mut order: Vec<(PipelineKind, usize)> = Vec::new();
        for r in &self.records {
            if !order.contains(&(r.algorithm, r.n)) {
                order.push((r.algorithm, r.n));
            }
        }
        order
            .into_iter()
            .filter_map(|(algorithm, n)| {
                let rows: Vec<&TrialRecord> = self
                    .records
                    .iter()
                    .filter(|r| r.algorithm == algorithm && r.n == n && r.error.is_none())
                    .collect();
                if rows.is_empty() {
                    return None;
                }
                let count = rows.len() as f64;
                Some(AverageRow {
                    algorithm,
                    n,
                    trials: rows.len() as u64,
                    mul: rows.iter().map(|r| r.mul as f64).sum::<f64>() / count,
                    add: rows.iter().map(|r| r.add as f64).sum::<f64>() / count,
                    preprocess_ms: rows.iter().map(|r| r.preprocess_ms).sum::<f64>() / count,
                    delta: rows.iter().map(|r| r.delta as f64).sum::<f64>() / count,
                    blocks: rows.iter().map(|r| r.blocks as f64).sum::<f64>() / count,
                })
            })
            .collect()
    }

    /// CSV with fixed columns
    /// `algorithm,n,trial,mul,add[,preprocess_ms],delta,blocks,kinds,verified,error`;
    /// averaged rows use `avg` in the trial column. Timings are opt-in so
    /// that equal seeds render byte-identical output.
    pub fn to_csv(&self, include_timings: bool) -> String {
        let mut out = String::new();
        out.push_str("algorithm,n,trial,mul,add");
        if include_timings {
            out.push_str(",preprocess_ms");
        }
        out.push_str(",delta,blocks,kinds,verified,error\n");
        for r in &self.records {
            let verified = match r.verified {
                None => "",
                Some(true) => "ok",
                Some(false) => "FAIL",
            };
            let _ = write!(out, "{},{},{},{},{}", r.algorithm.as_str(), r.n, r.trial, r.mul, r.add);
            if include_timings {
                let _ = write!(out, ",{:.3}", r.preprocess_ms);
            }
            let _ = writeln!(
                out,
                ",{},{},{},{},{}",
                r.delta,
                r.blocks,
                r.kinds,
                verified,
                r.error.as_deref().unwrap_or("")
            );
        }
        for a in self.averages() {
            let _ = write!(
                out,
                "{},{},avg,{:.2},{:.2}",
                a.algorithm.as_str(),
                a.n,
                a.mul,
                a.add
            );
            if include_timings {
                let _ = write!(out, ",{:.3}", a.preprocess_ms);
            }
            let _ = writeln!(out, ",{:.2},{:.2},,,", a.delta, a.blocks);
        }
        out
    }

    /// Two-column whitespace table of per-trial metric pairs for two
    /// algorithms, gnuplot-ready: `x = metric under a`, `y = metric under
    /// b`. Trials where either side failed are skipped.
    pub fn scatter(&self, a: PipelineKind, b: PipelineKind, metric: Metric) -> Option<String> {
        if !self.records.iter().any(|r| r.algorithm == a)
            || !self.records.iter().any(|r| r.algorithm == b)
        {
            return None;
        }
        let value = |r: &TrialRecord| match metric {
            Metric::Mul => r.mul,
            Metric::Add => r.add,
        };
        let mut out = format!(
            "# {} under `{}` (x) vs `{}` (y), one point per trial\n",
            metric.as_str(),
            a.as_str(),
            b.as_str()
        );
        for ra in self
            .records
            .iter()
            .filter(|r| r.algorithm == a && r.error.is_none())
        {
            if let Some(rb) = self.records.iter().find(|r| {
                r.algorithm == b && r.n == ra.n && r.trial == ra.trial && r.error.is_none()
            }) {
                let _ = writeln!(out, "{} {}", value(ra), value(rb));
            }
        }
        Some(out)
    }

    /// Human-readable averaged summary for the terminal.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<12} {:>6} {:>7} {:>12} {:>12} {:>8} {:>7}",
            "algorithm", "n", "trials", "mul(avg)", "add(avg)", "delta", "blocks"
        );
        for a in self.averages() {
            let _ = writeln!(
                out,
                "{:<12} {:>6} {:>7} {:>12.2} {:>12.2} {:>8.2} {:>7.2}",
                a.algorithm.as_str(),
                a.n,
                a.trials,
                a.mul,
                a.add,
                a.delta,
                a.blocks
            );
        }
        out
    }
}
