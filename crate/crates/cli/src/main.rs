//! `tfwd`: solvers, bound sweeps, stability certificates and the inequality
//! suite of the TFWD workbench.
//!
//! Exit codes: 0 success, 1 failed check, 2 usage or input error, 3 solver
//! did not converge.

/// `println!` that ignores a closed stdout (e.g. output piped into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

mod commands;
mod config;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use config::{Common, RunConfig};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tfwd_core::stability::BallTermVariant;

#[derive(Parser)]
#[command(name = "tfwd", version, about = "Relativistic TFWD density functional workbench")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Strict,
    Halved,
}

#[derive(Subcommand)]
enum Command {
    /// Run the inequality and identity checks
    Verify {
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// Solve the Thomas-Fermi atom
    TfSolve,
    /// Minimize the TF-Weizsäcker functional
    TfwSolve,
    /// Evaluate the TFWD energy of a density (CSV `r,rho`) or of the TFW minimizer
    Energy {
        /// CSV with columns `r,rho`; without it the TFW minimizer at --Z is used
        #[arg(long)]
        density: Option<PathBuf>,
    },
    /// Upper and lower bounds over a range of charges at fixed kappa
    Sweep,
    /// Molecular lower-bound certificate for nuclei read from JSON {centers, charges, c, N}
    Stability {
        /// JSON file with centers, charges, c and N
        #[arg(long)]
        nuclei: PathBuf,
        /// Ball-term constant: strict (5944 pi/105) or halved (2972 pi/105)
        #[arg(long, value_enum, default_value = "strict")]
        variant: Variant,
    },
    /// Table of f^2, F, tf, X on a log grid
    SpecfunTable {
        #[arg(long, default_value_t = 1e-3)]
        t_min: f64,
        #[arg(long, default_value_t = 1e3)]
        t_max: f64,
        /// Log-spaced points from --t-min to --t-max
        #[arg(long, default_value_t = 601)]
        points: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify { .. } => "verify",
            Command::TfSolve => "tf-solve",
            Command::TfwSolve => "tfw-solve",
            Command::Energy { .. } => "energy",
            Command::Sweep => "sweep",
            Command::Stability { .. } => "stability",
            Command::SpecfunTable { .. } => "specfun-table",
        }
    }
}

pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub check_failed: bool,
    pub solver_failed: bool,
}

impl Outcome {
    pub fn ok(outputs: Vec<PathBuf>) -> Self {
        Outcome { outputs, check_failed: false, solver_failed: false }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s).map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    arguments: serde_json::Value,
    outputs: Vec<String>,
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let cfg = RunConfig::resolve(cli.command.name(), &cli.common)?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| anyhow::anyhow!("creating {}: {e}", cfg.out.display()))?;
    let (outcome, arguments) = match &cli.command {
        Command::Verify { inject_fault } => {
            (commands::verify(&cfg, inject_fault.clone())?, serde_json::json!({ "checks": verify::check_names() }))
        }
        Command::TfSolve => (commands::tf_solve(&cfg)?, serde_json::Value::Null),
        Command::TfwSolve => (commands::tfw_solve(&cfg)?, serde_json::Value::Null),
        Command::Energy { density } => {
            (commands::energy(&cfg, density.as_deref())?, serde_json::json!({ "density": density }))
        }
        Command::Sweep => (commands::sweep(&cfg)?, serde_json::Value::Null),
        Command::Stability { nuclei, variant } => {
            let v = match variant {
                Variant::Strict => BallTermVariant::Strict,
                Variant::Halved => BallTermVariant::Halved,
            };
            (commands::stability(&cfg, nuclei, v)?, serde_json::json!({ "nuclei": nuclei, "variant": v }))
        }
        Command::SpecfunTable { t_min, t_max, points } => (
            commands::specfun_table(&cfg, *t_min, *t_max, *points)?,
            serde_json::json!({ "t_min": t_min, "t_max": t_max, "points": points }),
        ),
    };
    let manifest = Manifest {
        tool: "tfwd",
        version: env!("CARGO_PKG_VERSION"),
        config: &cfg,
        arguments,
        outputs: outcome.outputs.iter().map(|p| p.display().to_string()).collect(),
    };
    write_json(&cfg.out.join("manifest.json"), &manifest)?;
    Ok(outcome)
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<tfwd_core::Error>() {
        Some(tfwd_core::Error::Solver { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) if o.solver_failed => ExitCode::from(3),
        Ok(o) if o.check_failed => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
