//! Command-line front end for the truncated weighted-shift library.
//!
//! Subcommands map one-to-one onto the library's analyses: periodicity
//! defect series, weight positivization, the block alternation identities,
//! corner-algebra structure, the simplicity decision, the corner dimension
//! probe, and representation-data checks.  Input is strict JSON; output is
//! deterministic JSON (canonical key order, fixed float format) or CSV.
//!
//! Exit codes: 0 on success, 1 on validation failure, 2 when the spec is
//! valid but outside the families the requested analysis covers.

pub mod commands;
pub mod json;
pub mod spec_file;

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use commands::{CliError, Rendered};

#[derive(Parser)]
#[command(
    name = "wcuntz",
    version,
    about = "Analyses of truncated weighted-shift operator models"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Defect series measuring eventual periodicity of the weight tail
    #[command(name = "check-ap")]
    CheckAp {
        /// Weight-spec JSON file
        #[arg(long)]
        spec: PathBuf,
        /// Candidate period of the weight tail
        #[arg(long)]
        p: usize,
        /// Truncation level (default: per-command dimension budget)
        #[arg(long = "K")]
        max_level: Option<usize>,
        /// Write the JSON report here instead of omitting it
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the defect series CSV here (default: stdout)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Conjugate the weight sequence to positive blocks
    Positivize {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "K")]
        max_level: Option<usize>,
        /// Write the JSON report here (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare level compressions of the alternating family against their
    /// closed forms
    #[command(name = "fock-identities")]
    FockIdentities {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "K")]
        max_level: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the corner algebra model and its summand decomposition
    #[command(name = "analyze-c00")]
    AnalyzeC00 {
        #[arg(long)]
        spec: PathBuf,
        /// Seed for the randomized central-element draws
        #[arg(long)]
        seed: Option<u64>,
        /// Rank tolerance for span decisions
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide simplicity of the quotient algebra for the spec's family
    #[command(name = "decide-simplicity")]
    DecideSimplicity {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the corner algebra dimension from finite levels
    #[command(name = "probe-c00")]
    ProbeC00 {
        #[arg(long)]
        spec: PathBuf,
        /// Window period (default: the classified family's period)
        #[arg(long)]
        p: Option<usize>,
        #[arg(long = "K")]
        max_level: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the dimension series CSV here as well
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check representation data against the spec's corner model
    #[command(name = "rep-check")]
    RepCheck {
        #[arg(long)]
        spec: PathBuf,
        /// Representation-data JSON file
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const DEFAULT_TOL: f64 = 1e-9;

/// Parses arguments, runs the command, writes outputs, returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Cmd::CheckAp {
            spec,
            p,
            max_level,
            out,
            csv,
        } => {
            let spec = commands::load_spec(&spec)?;
            let rendered = commands::check_ap(&spec, p, max_level)?;
            // The CSV series is the primary artifact; JSON only on request.
            write_csv_primary(&rendered, out.as_deref(), csv.as_deref())
        }
        Cmd::Positivize {
            spec,
            max_level,
            out,
        } => {
            let spec = commands::load_spec(&spec)?;
            let rendered = commands::positivize_cmd(&spec, max_level)?;
            write_json_primary(&rendered, out.as_deref(), None)
        }
        Cmd::FockIdentities {
            spec,
            max_level,
            out,
        } => {
            let spec = commands::load_spec(&spec)?;
            let rendered = commands::fock_identities(&spec, max_level)?;
            write_json_primary(&rendered, out.as_deref(), None)
        }
        Cmd::AnalyzeC00 {
            spec,
            seed,
            tol,
            out,
        } => {
            let spec = commands::load_spec(&spec)?;
            let rendered = commands::analyze_c00(
                &spec,
                seed.unwrap_or(weighted_cuntz::quotient::DEFAULT_MODEL_SEED),
                tol.unwrap_or(DEFAULT_TOL),
            )?;
            write_json_primary(&rendered, out.as_deref(), None)
        }
        Cmd::DecideSimplicity {
            spec,
            seed,
            tol,
            out,
        } => {
            let spec = commands::load_spec(&spec)?;
            let rendered = commands::decide_simplicity_cmd(
                &spec,
                seed.unwrap_or(weighted_cuntz::quotient::DEFAULT_MODEL_SEED),
                tol.unwrap_or(DEFAULT_TOL),
            )?;
            write_json_primary(&rendered, out.as_deref(), None)
        }
        Cmd::ProbeC00 {
            spec,
            p,
            max_level,
            tol,
            out,
            csv,
        } => {
            let spec = commands::load_spec(&spec)?;
            let rendered =
                commands::probe_c00(&spec, p, max_level, tol.unwrap_or(DEFAULT_TOL))?;
            write_json_primary(&rendered, out.as_deref(), csv.as_deref())
        }
        Cmd::RepCheck {
            spec,
            data,
            seed,
            tol,
            out,
        } => {
            let spec = commands::load_spec(&spec)?;
            let rendered = commands::rep_check(
                &spec,
                &data,
                seed.unwrap_or(weighted_cuntz::quotient::DEFAULT_MODEL_SEED),
                tol.unwrap_or(DEFAULT_TOL),
            )?;
            write_json_primary(&rendered, out.as_deref(), None)
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}

/// JSON goes to `--out` or stdout; CSV is written only when `--csv` names a
/// destination.
fn write_json_primary(
    rendered: &Rendered,
    out: Option<&Path>,
    csv: Option<&Path>,
) -> Result<i32, CliError> {
    if let Some(json) = &rendered.json {
        match out {
            Some(path) => write_file(path, json)?,
            None => print!("{json}"),
        }
    }
    if let (Some(csv_text), Some(path)) = (&rendered.csv, csv) {
        write_file(path, csv_text)?;
    }
    Ok(rendered.exit)
}

/// CSV goes to `--csv` or stdout; JSON is written only when `--out` names a
/// destination.
fn write_csv_primary(
    rendered: &Rendered,
    out: Option<&Path>,
    csv: Option<&Path>,
) -> Result<i32, CliError> {
    if let Some(csv_text) = &rendered.csv {
        match csv {
            Some(path) => write_file(path, csv_text)?,
            None => print!("{csv_text}"),
        }
    }
    if let (Some(json), Some(path)) = (&rendered.json, out) {
        write_file(path, json)?;
    }
    Ok(rendered.exit)
}
