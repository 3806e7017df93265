//! The `lenscount` command line.
//!
//! Exit codes: 0 certified, 1 usage or IO error, 2 uncertified or not simple,
//! 3 unsupported request.

pub mod commands;
pub mod documents;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lenscount_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNCERTIFIED: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "lenscount",
    version,
    about = "Certified image counts for harmonic lens equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Default, Args)]
pub struct ToleranceFlags {
    /// Residual tolerance of the Newton polish.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Threshold on |jacobian| below which a zero counts as singular.
    #[arg(long = "sing-tol", global = true)]
    pub sing_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the equation of a config file and certify the count.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Report path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tolerances: ToleranceFlags,
    },
    /// Certify a config, or an existing report of it, by winding balance.
    Certify {
        #[arg(long)]
        config: PathBuf,
        /// A solve report whose solution list is certified instead of a fresh solve.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tolerances: ToleranceFlags,
    },
    /// Build a configuration with a known image count and certify it.
    Construct {
        family: Family,
        /// circle N | rhie M | perturbed M | poly N K; addmass takes none.
        #[arg(num_args = 0..=2)]
        sizes: Vec<usize>,
        /// Circle radius for `circle`.
        #[arg(long)]
        radius: Option<f64>,
        /// Small mass for `rhie` and `addmass`.
        #[arg(long)]
        eps: Option<f64>,
        /// Position `re,im` of the new mass for `addmass`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        at: Option<num_complex::Complex64>,
        /// Base mass configuration for `addmass`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the bare configuration here.
        #[arg(long)]
        config_out: Option<PathBuf>,
    },
    /// Raster the certified count as one mass sweeps a window.
    Scan {
        #[arg(long)]
        config: PathBuf,
        /// Output prefix for `.csv`, `.ppm` and `.summary.json`; defaults to the config path without extension.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `NX` or `NXxNY`, overriding the spec.
        #[arg(long, value_parser = parse_resolution)]
        resolution: Option<(usize, usize)>,
    },
    /// Time delays, Morse types and the lower-bound check.
    Timedelay {
        #[arg(long, conflicts_with = "sweep")]
        config: Option<PathBuf>,
        /// Check this many seeded random configurations instead.
        #[arg(long, requires = "seed")]
        sweep: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of masses in sweep configurations; cycles through 2..=5 when absent.
        #[arg(long)]
        masses: Option<usize>,
        /// Side of the grid used to locate the global minimum of the delay.
        #[arg(long, default_value_t = lenscount_core::timedelay::PETTERS_GRID)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tolerances: ToleranceFlags,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Circle,
    Rhie,
    Perturbed,
    Addmass,
    Poly,
}

fn parse_complex(s: &str) -> Result<num_complex::Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `re,im`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok(num_complex::Complex64::new(parse(re)?, parse(im)?))
}

fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let n = parse(s)?;
            Ok((n, n))
        }
    }
}

/// Exit code for a failure of the numerical core.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NonSimple(_)
        | Error::CountMismatch(_)
        | Error::ValidationFailed { .. }
        | Error::GuardViolation { .. }
        | Error::PhaseAmbiguity { .. }
        | Error::NonConvergence(..)
        | Error::JacobianSingular(_) => EXIT_UNCERTIFIED,
        Error::Unsupported(_) | Error::DegreeOverflow { .. } => EXIT_UNSUPPORTED,
        _ => EXIT_USAGE,
    }
}

/// Runs a parsed command line and returns the process exit code. Diagnostics
/// go to standard error.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Solve {
            config,
            out,
            tolerances,
        } => commands::solve(&config, out.as_deref(), tolerances),
        Command::Certify {
            config,
            report,
            out,
            tolerances,
        } => commands::certify(&config, report.as_deref(), out.as_deref(), tolerances),
        Command::Construct {
            family,
            sizes,
            radius,
            eps,
            at,
            config,
            out,
            config_out,
        } => commands::construct(
            &commands::ConstructRequest {
                family,
                sizes,
                radius,
                eps,
                at,
                base: config,
            },
            out.as_deref(),
            config_out.as_deref(),
        ),
        Command::Scan {
            config,
            out,
            resolution,
        } => commands::scan(&config, out.as_deref(), resolution),
        Command::Timedelay {
            config,
            sweep,
            seed,
            masses,
            grid,
            out,
            tolerances,
        } => commands::timedelay(
            &commands::TimeDelayRequest {
                config,
                sweep,
                seed,
                masses,
                grid,
            },
            out.as_deref(),
            tolerances,
        ),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            err.downcast_ref::<Error>().map_or(EXIT_USAGE, exit_code_for)
        }
    }
}
