//! `spinphase`: datasets for spin- and phase-squeezing studies.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.
//! `SPINPHASE_THREADS` caps the worker pool.

mod commands;
mod output;
mod range;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, CliResult, Format, MetricChoice, PanelOptions};

#[derive(Parser)]
#[command(name = "spinphase", version, about = "Spin and phase squeezing datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Table of xi^2, zeta^2, sharpness and variances per state and N.
    Metrics {
        /// Comma-separated kinds: coherent, yurke[(alpha)], noon, optimal, twist(nu), sss, pss.
        #[arg(long, default_value = "coherent,yurke,noon,optimal,sss,pss")]
        states: String,
        /// Particle numbers, e.g. 20, 2..100, 10..100:10 or comma lists.
        #[arg(long, default_value = "20")]
        n: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-axis counter-twisting: nu sweeps or optimal times.
    Twist {
        #[arg(long, default_value = "20")]
        n: String,
        /// Uniform nu grid as start:stop:count.
        #[arg(long, conflicts_with = "optimize")]
        sweep: Option<String>,
        /// Optimal twisting times per N.
        #[arg(long)]
        optimize: bool,
        #[arg(long, value_enum, default_value_t = MetricChoice::Both)]
        metric: MetricChoice,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-state Wigner, phase-distribution and coefficient CSV files.
    Panel {
        #[arg(long, default_value_t = 20)]
        n: u32,
        #[arg(long, default_value = "coherent,pss,sss,yurke,noon")]
        states: String,
        #[arg(long)]
        out_dir: PathBuf,
        /// Phase-distribution intervals on [-pi, pi] (default max(512, 8J+1)).
        #[arg(long)]
        phase_points: Option<usize>,
        /// Wigner raster columns over [-pi, pi].
        #[arg(long, default_value_t = 129)]
        wigner_phi: usize,
        /// Wigner raster rows over cos(theta) in [-1, 1].
        #[arg(long, default_value_t = 65)]
        wigner_rows: usize,
    },
    /// One state as JSON in the J_z basis.
    State {
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 20)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("SPINPHASE_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Config(format!("SPINPHASE_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn parse_ns(spec: &str) -> CliResult<Vec<u32>> {
    range::parse_n_list(spec).map_err(CliError::Config)
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Metrics {
            states,
            n,
            format,
            out,
        } => commands::cmd_metrics(&commands::parse_kinds(&states)?, &parse_ns(&n)?, format, out.as_deref()),
        Command::Twist {
            n,
            sweep,
            optimize,
            metric,
            format,
            out,
        } => {
            let ns = parse_ns(&n)?;
            match (sweep, optimize) {
                (Some(spec), _) => {
                    let (lo, hi, count) = range::parse_sweep(&spec).map_err(CliError::Config)?;
                    commands::cmd_twist_sweep(&ns, lo, hi, count, format, out.as_deref())
                }
                (None, true) => commands::cmd_twist_optimize(&ns, metric, format, out.as_deref()),
                (None, false) => Err(CliError::Config("twist needs --sweep or --optimize".into())),
            }
        }
        Command::Panel {
            n,
            states,
            out_dir,
            phase_points,
            wigner_phi,
            wigner_rows,
        } => {
            let opts = PanelOptions {
                phase_points,
                wigner_phi,
                wigner_rows,
            };
            commands::cmd_panel(&commands::parse_kinds(&states)?, n, &out_dir, &opts).map(|_| ())
        }
        Command::State { kind, n, out } => {
            let kind = kind.parse().map_err(|e: spinphase_core::Error| CliError::Config(e.to_string()))?;
            commands::cmd_state(kind, n, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spinphase: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
