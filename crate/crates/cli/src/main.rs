//! `qfm`: command-line front end for quasi-free state computations.

mod error;
mod io;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use qfm_core::markov::{self, CheckOptions, InstanceKind, TripletPartition};
use qfm_core::oracle;
use qfm_core::quasifree::QuasiFreeState;
use qfm_core::sweep::Execution;

use crate::error::CliError;
use crate::io::MatrixFile;
use crate::report::{EntropyReport, ReportFile, Tolerances};

#[derive(Parser, Debug)]
#[command(name = "qfm", version, about = "Quasi-free CCR states and Markov triplets")]
struct Cli {
    /// Seed for generated instances; echoed in every report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every Markov criterion on a 3-block matrix file.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = markov::FLOW_TOL)]
        tol: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1.0,1.4142135623,3.1415926535")]
        t_samples: Vec<f64>,
    },
    /// Closed-form von Neumann entropy of the quasi-free state.
    Entropy {
        #[arg(long)]
        input: PathBuf,
    },
    /// Emit a generated instance as a matrix file.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
        dims: Vec<usize>,
    },
    /// Reproduce a worked example end to end.
    Reproduce {
        #[arg(value_enum)]
        example: Example,
    },
    /// Cross-validate closed forms against the truncated Fock representation.
    Oracle {
        #[arg(long, value_delimiter = ',', default_value = "40")]
        cutoff: Vec<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Markov,
    Random,
    Counterexample,
}

impl From<Kind> for InstanceKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Markov => InstanceKind::Markov,
            Kind::Random => InstanceKind::Random,
            Kind::Counterexample => InstanceKind::Counterexample,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Example {
    Counterexample,
}

#[derive(serde::Serialize)]
struct OracleRun {
    cutoff: usize,
    checks: Vec<oracle::OracleCheck>,
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let out = cli.out.as_deref();
    match cli.command {
        Command::Check { input, tol, t_samples } => {
            if tol.is_nan() || tol <= 0.0 {
                return Err(CliError::Argument(format!("--tol must be positive, got {tol}")));
            }
            let a = io::parse_matrix_file(&input)?;
            let opts = CheckOptions {
                tol,
                t_samples,
                ..CheckOptions::default()
            };
            let report = markov::check(&a, &opts)?;
            let tolerances = Tolerances {
                tol: Some(opts.tol),
                gap_tol: Some(opts.gap_tol),
                t_samples: Some(opts.t_samples),
                oracle_tol: None,
            };
            io::emit(&ReportFile::new("check", cli.seed, tolerances, elapsed_ms(start), report), out)
        }
        Command::Entropy { input } => {
            let a = io::parse_matrix_file(&input)?;
            let dims = a.dims().to_vec();
            let state = QuasiFreeState::new(a)?;
            let report = EntropyReport {
                dims,
                eigenvalues: state.eigenvalues().to_vec(),
                entropy_nats: state.entropy(),
            };
            io::emit(
                &ReportFile::new("entropy", cli.seed, Tolerances::default(), elapsed_ms(start), report),
                out,
            )
        }
        Command::Gen { kind, dims } => {
            let dims = match dims[..] {
                [d1, d2, d3] => TripletPartition::new(d1, d2, d3)?,
                _ => {
                    return Err(CliError::Argument(format!(
                        "--dims takes three block sizes, got {dims:?}"
                    )))
                }
            };
            let a = markov::gen_instance(kind.into(), dims, cli.seed)?;
            io::write_text(&MatrixFile::from_matrix(&a).to_json(), out)
        }
        Command::Reproduce { example: Example::Counterexample } => {
            let r = markov::reproduce_counterexample()?;
            let failed: Vec<String> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
            let opts = CheckOptions::default();
            let tolerances = Tolerances {
                tol: Some(opts.tol),
                gap_tol: Some(opts.gap_tol),
                t_samples: Some(opts.t_samples),
                oracle_tol: None,
            };
            io::emit(&ReportFile::new("reproduce", cli.seed, tolerances, elapsed_ms(start), r), out)?;
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::ChecksFailed(format!("failed checks: {}", failed.join("; "))))
            }
        }
        Command::Oracle { cutoff } => {
            if let Some(&c) = cutoff.iter().find(|&&c| c == 0) {
                return Err(CliError::Argument(format!("cutoff must be positive, got {c}")));
            }
            let runs: Vec<OracleRun> = cutoff
                .iter()
                .map(|&c| OracleRun {
                    cutoff: c,
                    checks: oracle::cross_validate(c, Execution::default()),
                })
                .collect();
            let failed = runs
                .iter()
                .flat_map(|r| r.checks.iter().filter(|c| !c.passed).map(move |c| format!("{} at cutoff {}", c.name, r.cutoff)))
                .collect::<Vec<_>>();
            let tolerances = Tolerances {
                oracle_tol: Some(oracle::ORACLE_TOL),
                ..Tolerances::default()
            };
            io::emit(&ReportFile::new("oracle", cli.seed, tolerances, elapsed_ms(start), runs), out)?;
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::ChecksFailed(format!("failed checks: {}", failed.join("; "))))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qfm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
