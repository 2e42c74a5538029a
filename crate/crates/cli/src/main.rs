//! Command-line entry point: runs encoding-complexity experiments over
//! built-in ensembles or matrices from extended-alist files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ldpc_blocktri::blocktri::SolverMode;
use ldpc_blocktri::pipeline::PipelineKind;
use ldpc_blocktri_cli::{run_experiment, EnsembleSpec, ExperimentConfig, Metric};

/// Encoding-complexity experiments for LDPC encoders.
///
/// Samples parity-check matrices, builds each selected encoder, runs one
/// instrumented encode per trial, and writes per-trial plus averaged
/// operation counts as CSV. With `--verify`, every codeword is checked
/// against the original matrix and every measured count against its
/// closed-form prediction; any failure makes the exit code nonzero.
#[derive(Parser, Debug)]
#[command(name = "ldpc-blocktri", version, about)]
struct Args {
    /// Matrix source: e8, e2, or cycle (rate-1/2 proper cycle codes).
    #[arg(long, default_value = "e8")]
    ensemble: String,

    /// Encode matrices from this extended-alist file instead of sampling.
    #[arg(long)]
    matrix: Option<PathBuf>,

    /// Comma-separated code lengths.
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    n: Vec<usize>,

    /// Field order (power of two up to 256); defaults per ensemble.
    #[arg(long)]
    q: Option<u16>,

    /// Matrices sampled per code length.
    #[arg(long, default_value_t = 10)]
    trials: u64,

    /// Base seed; equal seeds give identical reports.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Comma-separated algorithms: ru, kaji, blocktri, blocktri-lu.
    #[arg(long, value_delimiter = ',', default_value = "ru,kaji,blocktri")]
    algos: Vec<String>,

    /// Solver for ATM blocks inside `blocktri`: ru or lu.
    #[arg(long, default_value = "ru")]
    atm_solver: String,

    /// Verify parity and count fidelity of every trial.
    #[arg(long)]
    verify: bool,

    /// Write the CSV report here (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write gnuplot-ready scatter tables with this path prefix, one file
    /// per algorithm pair and metric.
    #[arg(long)]
    plot_data: Option<PathBuf>,

    /// Include preprocessing wall time in the CSV (breaks byte-for-byte
    /// reproducibility of the output).
    #[arg(long)]
    timings: bool,
}

fn parse_args(args: &Args) -> Result<ExperimentConfig, String> {
    let ensemble = match (&args.matrix, args.ensemble.as_str()) {
        (Some(path), _) => EnsembleSpec::File(path.clone()),
        (None, "e8") => EnsembleSpec::E8,
        (None, "e2") => EnsembleSpec::E2,
        (None, "cycle") => EnsembleSpec::Cycle,
        (None, other) => return Err(format!("unknown ensemble `{other}`")),
    };
    let algos = args
        .algos
        .iter()
        .map(|s| PipelineKind::parse(s).ok_or_else(|| format!("unknown algorithm `{s}`")))
        .collect::<Result<Vec<_>, _>>()?;
    let atm_solver = match args.atm_solver.as_str() {
        "ru" => SolverMode::Ru,
        "lu" => SolverMode::Lu,
        other => return Err(format!("unknown atm solver `{other}`")),
    };
    Ok(ExperimentConfig {
        ensemble,
        n_list: args.n.clone(),
        q: args.q,
        trials: args.trials,
        seed: args.seed,
        algos,
        atm_solver,
        verify: args.verify,
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match parse_args(&args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };

    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let csv = report.to_csv(args.timings);
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &csv) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{csv}"),
    }

    if let Some(prefix) = &args.plot_data {
        for i in 0..cfg.algos.len() {
            for j in i + 1..cfg.algos.len() {
                for metric in [Metric::Mul, Metric::Add] {
                    let (a, b) = (cfg.algos[i], cfg.algos[j]);
                    let Some(table) = report.scatter(a, b, metric) else {
                        continue;
                    };
                    let path = format!(
                        "{}.{}_vs_{}.{}.dat",
                        prefix.display(),
                        a.as_str(),
                        b.as_str(),
                        metric.as_str()
                    );
                    if let Err(e) = std::fs::write(&path, table) {
                        eprintln!("error: cannot write {path}: {e}");
                        return ExitCode::from(2);
                    }
                }
            }
        }
    }

    eprint!("{}", report.summary_table());
    if report.any_verification_failure() {
        eprintln!("verification FAILED for at least one trial");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
