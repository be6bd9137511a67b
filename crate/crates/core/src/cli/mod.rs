//! The `mca` command line: experiment runners and the argument parser.
//!
//! Exit codes: 0 on success, 2 on invalid input or any error, 3 when a
//! separation finished without a converged certificate (outputs are still
//! written).

mod demo;
mod experiments;
mod spec;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use demo::{default_lambda, generate_scene, run_demo, DemoConfig, DemoOutcome, DemoReport, Scene};
pub use experiments::{
    dirac_comb, perfect_sqrt, phase_transition, phase_transition_with, plant_sparse, theorem_bound, trial_rng,
    uncertainty_experiment, ExperimentConfig, PhaseTransitionRow, Trial, UncertaintyRow, UncertaintySummary,
    SUCCESS_TOL,
};
pub use spec::{cluster_from_args, parse_indices, DictSpec, FrameSpec};

use crate::coherence::{babel_sequence, coherence_report, mutual_coherence, ClusterSpec};
use crate::io::{read_pgm, read_signal_csv, write_json, write_rows_csv};
use crate::separate::{bound_report, default_cluster_spec, separate, Mode};
use crate::solvers::{write_trace_csv, SolverConfig};
use crate::{ConcatDictionary, Dictionary, Error, Result, Shape};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Share of analysis `l1` mass used for the default clusters of `separate`.
const DEFAULT_CLUSTER_FRACTION: f64 = 0.9;

#[derive(Debug, Parser)]
#[command(name = "mca", version, about = "Morphological component analysis experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coherence measures of a dictionary.
    Coherence {
        /// `FRAME` or `FRAME+FRAME`; frames are dirac, fourier, dct, haar,
        /// haar2d, dct2d or matrix:PATH.
        #[arg(long)]
        dict: String,
        /// Signal length (side length for 2D frames).
        #[arg(long)]
        n: Option<usize>,
        /// Cluster in the first frame as a JSON index array; all atoms when omitted.
        #[arg(long)]
        lambda1: Option<String>,
        #[arg(long)]
        lambda2: Option<String>,
        /// Random probes for the joint-concentration lower bound.
        #[arg(long, default_value_t = 64)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact-recovery rate of basis pursuit over the Fourier/Dirac pair.
    PhaseTransition {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long, default_value_t = 16)]
        k_max: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time/frequency support counts against the discrete uncertainty bound.
    Uncertainty {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Separates a CSV (1D) or PGM (2D) signal into two components.
    Separate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        dict: String,
        /// synthesis_eq, analysis_eq, synthesis_denoise or analysis_denoise.
        #[arg(long, default_value = "synthesis_eq")]
        mode: String,
        /// Weight of the quadratic misfit in the denoising modes.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        lambda1: Option<String>,
        #[arg(long)]
        lambda2: Option<String>,
        #[arg(long)]
        max_iterations: Option<usize>,
        /// Also write the objective trace to trace.csv.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthetic dots-and-lines image separated with haar2d+dct2d.
    Demo2d {
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, default_value_t = 3)]
        lines: usize,
        #[arg(long, default_value_t = 0.05)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to 1 / (sqrt(2) sigma).
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

fn prepare_out(out: Option<&Path>) -> Result<()> {
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

/// Prints to stdout, ignoring a closed pipe.
fn say(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>, file: &str) -> Result<()> {
    say(&serde_json::to_string_pretty(value)?);
    if let Some(dir) = out {
        write_json(&dir.join(file), value)?;
    }
    Ok(())
}

/// Coherence of a single dictionary (no second frame to pair with).
#[derive(Debug, Serialize)]
struct SingleReport {
    mutual: f64,
    babel: Vec<f64>,
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Coherence { dict, n, lambda1, lambda2, probes, seed, out } => {
            prepare_out(out.as_deref())?;
            let spec: DictSpec = dict.parse()?;
            match spec.build(n.map(Shape::Line))? {
                (first, Some(second)) => {
                    let all = |p: usize| (0..p).collect::<Vec<_>>();
                    let (p1, p2) = (first.num_atoms(), second.num_atoms());
                    let l1 = lambda1.as_deref().map(parse_indices).transpose()?.unwrap_or_else(|| all(p1));
                    let l2 = lambda2.as_deref().map(parse_indices).transpose()?.unwrap_or_else(|| all(p2));
                    let pair = ConcatDictionary::new(first, second)?;
                    let report = coherence_report(&pair, &ClusterSpec::new(l1, l2), probes, seed)?;
                    emit_json(&report, out.as_deref(), "coherence.json")?;
                }
                (single, None) => {
                    if lambda1.is_some() || lambda2.is_some() {
                        return Err(Error::InvalidParameter("cluster coherence needs a two-frame dictionary".into()));
                    }
                    let report = SingleReport { mutual: mutual_coherence(&single)?, babel: babel_sequence(&single)? };
                    emit_json(&report, out.as_deref(), "coherence.json")?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::PhaseTransition { n, k_min, k_max, trials, seed, out } => {
            prepare_out(out.as_deref())?;
            let config = ExperimentConfig { n, k_range: (k_min, k_max), trials, seed };
            let rows = phase_transition(&config)?;
            for row in &rows {
                say(&format!(
                    "k={:<4} success_rate={:.3} mean_rel_error={:.3e} below_theorem_bound={}",
                    row.k, row.success_rate, row.mean_rel_error, row.below_theorem_bound
                ));
            }
            if let Some(dir) = out {
                write_rows_csv(&dir.join("phase_transition.csv"), &rows)?;
            }
            Ok(EXIT_OK)
        }
        Command::Uncertainty { n, trials, seed, out } => {
            prepare_out(out.as_deref())?;
            let (rows, summary) = uncertainty_experiment(n, trials, seed)?;
            if let Some(dir) = out.as_deref() {
                write_rows_csv(&dir.join("uncertainty.csv"), &rows)?;
            }
            emit_json(&summary, out.as_deref(), "uncertainty_summary.json")?;
            Ok(EXIT_OK)
        }
        Command::Separate { input, dict, mode, lambda, lambda1, lambda2, max_iterations, trace, out } => {
            let x = match input.extension().and_then(|e| e.to_str()) {
                Some(ext) if ext.eq_ignore_ascii_case("pgm") => read_pgm(&input)?,
                _ => read_signal_csv(&input)?,
            };
            let mode: Mode = mode.parse()?;
            let (f1, f2) = dict.parse::<DictSpec>()?.build_pair(Some(x.shape()))?;
            let mut config = SolverConfig { record_trace: trace, ..SolverConfig::default() };
            if let Some(l) = lambda {
                config = config.with_lambda(l);
            }
            if let Some(m) = max_iterations {
                config.max_iterations = m;
            }
            let clusters = cluster_from_args(lambda1.as_deref(), lambda2.as_deref())?;
            let mut result = separate(&x, &f1, &f2, mode, &config, clusters.as_ref())?;
            if clusters.is_none() {
                // default clusters; skipped when the pair is too large to densify
                let report = default_cluster_spec(&f1, &f2, &result.component1, &result.component2, DEFAULT_CLUSTER_FRACTION)
                    .and_then(|spec| bound_report(&f1, &f2, &result.component1, &result.component2, &spec, true));
                result.diagnostics = match report {
                    Ok(r) => Some(r),
                    Err(Error::TooLarge { .. }) => None,
                    Err(e) => return Err(e),
                };
            }
            result.write_dir(&out)?;
            if trace {
                write_trace_csv(&out.join("trace.csv"), &result.certificate.trace)?;
            }
            say(&serde_json::to_string_pretty(&result.certificate)?);
            if result.certificate.converged {
                Ok(EXIT_OK)
            } else {
                eprintln!("warning: solver did not converge; outputs in {} are flagged", out.display());
                Ok(EXIT_NOT_CONVERGED)
            }
        }
        Command::Demo2d { size, points, lines, sigma, seed, lambda, out } => {
            let config = DemoConfig { size, points, lines, sigma, seed, lambda };
            let outcome = run_demo(&config)?;
            outcome.write_dir(&out)?;
            say(&serde_json::to_string_pretty(&outcome.report)?);
            Ok(if outcome.report.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
        }
    }
}
