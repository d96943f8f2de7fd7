//! Command-line front end: build schemes, analyze reading strategies,
//! sweep tradeoff curves, and run the optimality verifier.
//!
//! Exit codes are part of the contract: 0 success, 2 bad argument,
//! 3 I/O failure, 4 degenerate scheme, 5 bound violation, 6 infeasible
//! optimization.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qseal::error::Error;
use qseal::fidelity::fbar_minmax;
use qseal::optimizer::{maximize_fidelity, BOUND_TOL};
use qseal::report::{analyze_at, curve_to_csv, fmt_sig15, tradeoff_curve};
use qseal::seal::{
    analyze_scheme, load_scheme, make_product_scheme, make_stringent_scheme, save_scheme,
    SealScheme,
};

#[derive(Parser)]
#[command(
    name = "qseal",
    about = "Model quantum bit seals and the information/disturbance tradeoff of reading them",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SchemeType {
    /// Qubit public factor with a qutrit ancilla; the scheme that pins the
    /// min-max fidelity.
    Stringent,
    /// Ancilla-free qubit scheme with the same reduced states.
    Product,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a built-in scheme and write it to a scheme file.
    Gen {
        /// Which built-in scheme family to use.
        #[arg(long = "type", value_enum, default_value_t = SchemeType::Stringent)]
        scheme_type: SchemeType,
        /// Trace distance between the two sealed states, in (0, 1].
        #[arg(long)]
        qmax: f64,
        /// Output path for the scheme file.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Analyze the optimal reading strategy at a fixed information gain.
    Analyze {
        /// Scheme file to analyze.
        scheme: PathBuf,
        /// Information gain q in [0, q_max].
        #[arg(long)]
        q: f64,
        /// Emit the report as JSON instead of key-value text.
        #[arg(long)]
        json: bool,
    },
    /// Sweep the information/disturbance tradeoff into a CSV file.
    Curve {
        /// Scheme file to sweep (alternative to --builtin).
        #[arg(long, conflicts_with = "builtin")]
        scheme: Option<PathBuf>,
        /// Sweep a built-in scheme instead of a file.
        #[arg(long, value_enum, requires = "qmax")]
        builtin: Option<SchemeType>,
        /// Trace distance for --builtin.
        #[arg(long)]
        qmax: Option<f64>,
        /// Number of grid points; rows at q = q_max * t / steps.
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Output CSV path.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Numerically maximize fidelity at fixed gain and compare to the bound.
    Optimize {
        /// Scheme file to attack.
        scheme: PathBuf,
        /// Information gain q in [0, q_max].
        #[arg(long)]
        q: f64,
        /// Measurement outcomes per candidate POVM.
        #[arg(long, default_value_t = 4)]
        outcomes: usize,
        /// Independent optimizer restarts (first one is warm-started).
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        /// Master seed; runs are deterministic given all flags.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the report as JSON instead of key-value text.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Serialize)]
struct OptimizeReport {
    q: f64,
    q_max: f64,
    best_fbar: f64,
    achieved_q: f64,
    bound: f64,
    gap_to_bound: f64,
    restarts_used: usize,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 3,
        Error::QmaxZero => 4,
        Error::BoundViolation { .. } => 5,
        Error::NoFeasiblePoint { .. } => 6,
        _ => 2,
    }
}

fn load(path: &PathBuf) -> Result<SealScheme, Error> {
    load_scheme(path)
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Gen {
            scheme_type,
            qmax,
            out,
        } => {
            let scheme = match scheme_type {
                SchemeType::Stringent => make_stringent_scheme(qmax)?,
                SchemeType::Product => make_product_scheme(qmax)?,
            };
            save_scheme(&scheme, &out)?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Command::Analyze { scheme, q, json } => {
            let scheme = load(&scheme)?;
            let report = analyze_at(&scheme, q)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                print!("{}", report.to_text());
            }
            Ok(0)
        }
        Command::Curve {
            scheme,
            builtin,
            qmax,
            steps,
            out,
        } => {
            let scheme = match (scheme, builtin) {
                (Some(path), None) => load(&path)?,
                (None, Some(kind)) => {
                    let qmax = qmax.ok_or_else(|| {
                        Error::ParamOutOfRange("--builtin requires --qmax".into())
                    })?;
                    match kind {
                        SchemeType::Stringent => make_stringent_scheme(qmax)?,
                        SchemeType::Product => make_product_scheme(qmax)?,
                    }
                }
                _ => {
                    return Err(Error::ParamOutOfRange(
                        "provide exactly one of --scheme or --builtin".into(),
                    ))
                }
            };
            let rows = tradeoff_curve(&scheme, steps)?;
            fs::write(&out, curve_to_csv(&rows))?;
            println!("wrote {} rows to {}", rows.len(), out.display());
            Ok(0)
        }
        Command::Optimize {
            scheme,
            q,
            outcomes,
            restarts,
            seed,
            json,
        } => {
            let scheme = load(&scheme)?;
            let q_max = analyze_scheme(&scheme)?.q_max;
            let result = maximize_fidelity(&scheme, q, outcomes, restarts, seed)?;
            let bound = fbar_minmax(q, q_max)?;
            let report = OptimizeReport {
                q,
                q_max,
                best_fbar: result.best_fbar,
                achieved_q: result.achieved_q,
                bound,
                gap_to_bound: result.gap_to_bound,
                restarts_used: result.restarts_used,
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                print!(
                    "q = {}\nq_max = {}\nbest_fbar = {}\nachieved_q = {}\nbound = {}\ngap_to_bound = {}\nrestarts_used = {}\n",
                    fmt_sig15(report.q),
                    fmt_sig15(report.q_max),
                    fmt_sig15(report.best_fbar),
                    fmt_sig15(report.achieved_q),
                    fmt_sig15(report.bound),
                    fmt_sig15(report.gap_to_bound),
                    report.restarts_used,
                );
            }
            if result.best_fbar > bound + BOUND_TOL {
                eprintln!(
                    "error: optimizer exceeded the fidelity bound by {:.3e}",
                    result.best_fbar - bound
                );
                return Ok(5);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
