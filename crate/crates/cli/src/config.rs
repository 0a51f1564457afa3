//! Run configuration: command-line flags layered over an optional JSON file.

use anyhow::{bail, Context};
use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use tfwd_core::bounds::BoundsOptions;
use tfwd_core::edf::{DEFAULT_LAMBDA, PHYSICAL_C};
use tfwd_core::semiclassic::TfwOptions;

/// Flags shared by all subcommands. Every field is optional so that values
/// from `--config` can fill the gaps.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Common {
    /// Nuclear charge
    #[arg(long = "Z", global = true)]
    #[serde(rename = "Z")]
    pub z: Option<f64>,
    /// Inclusive charge range a:b:step
    #[arg(long = "Z-range", global = true)]
    #[serde(rename = "Z_range")]
    pub z_range: Option<String>,
    /// Coupling Z/c (takes precedence over --c where both apply)
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    /// Speed of light in Hartree units [default: 137.037]
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Weizsäcker coefficient [default: 1/9]
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Weizsäcker weight of the TFW comparison functional [default: 2]
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Radial grid nodes [default: 4000]
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Innermost node is this over max(Z, 1) [default: 1e-6]
    #[arg(long, global = true)]
    pub r_min_factor: Option<f64>,
    /// Outermost node in Bohr [default: 50]
    #[arg(long, global = true)]
    pub r_max: Option<f64>,
    /// TFW convergence threshold [default: 1e-6]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output directory [default: tfwd-out]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps [default: 1]
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for randomized checks [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON file with any of the above fields
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

/// Fully resolved configuration, recorded in every manifest.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(rename = "Z")]
    pub z: Option<f64>,
    #[serde(rename = "Z_list")]
    pub z_list: Option<Vec<f64>>,
    pub kappa: Option<f64>,
    pub c: f64,
    pub lambda: f64,
    pub beta: f64,
    pub nodes: usize,
    pub r_min_factor: f64,
    pub r_max: f64,
    pub tol: f64,
    pub out: PathBuf,
    pub jobs: usize,
    pub seed: u64,
}

fn positive(name: &str, v: f64) -> anyhow::Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("--{name} must be positive, got {v}");
    }
    Ok(v)
}

impl RunConfig {
    pub fn resolve(command: &str, cli: &Common) -> anyhow::Result<Self> {
        let file = match &cli.config {
            Some(p) => load_file(p)?,
            None => Common::default(),
        };
        macro_rules! pick {
            ($f:ident) => {
                cli.$f.clone().or(file.$f.clone())
            };
        }
        let z = pick!(z).map(|v| positive("Z", v)).transpose()?;
        let z_list = pick!(z_range).map(|s| parse_range(&s)).transpose()?;
        let kappa = pick!(kappa).map(|v| positive("kappa", v)).transpose()?;
        let nodes = pick!(nodes).unwrap_or(4000);
        if nodes < 16 {
            bail!("--nodes must be at least 16, got {nodes}");
        }
        let jobs = pick!(jobs).unwrap_or(1);
        if jobs == 0 {
            bail!("--jobs must be at least 1");
        }
        let r_min_factor = positive("r-min-factor", pick!(r_min_factor).unwrap_or(1e-6))?;
        let r_max = positive("r-max", pick!(r_max).unwrap_or(50.0))?;
        if r_min_factor >= r_max {
            bail!("--r-min-factor must be below --r-max");
        }
        Ok(RunConfig {
            command: command.to_string(),
            z,
            z_list,
            kappa,
            c: positive("c", pick!(c).unwrap_or(PHYSICAL_C))?,
            lambda: positive("lambda", pick!(lambda).unwrap_or(DEFAULT_LAMBDA))?,
            beta: positive("beta", pick!(beta).unwrap_or(2.0))?,
            nodes,
            r_min_factor,
            r_max,
            tol: positive("tol", pick!(tol).unwrap_or(1e-6))?,
            out: pick!(out).unwrap_or_else(|| PathBuf::from("tfwd-out")),
            jobs,
            seed: pick!(seed).unwrap_or(0),
        })
    }

    pub fn require_z(&self) -> anyhow::Result<f64> {
        self.z.context("--Z is required")
    }

    /// `c` for charge `z`: from `kappa` if given, else `--c`.
    pub fn c_for(&self, z: f64) -> f64 {
        self.kappa.map_or(self.c, |k| z / k)
    }

    pub fn z_values(&self) -> anyhow::Result<Vec<f64>> {
        match (&self.z_list, self.z) {
            (Some(l), _) => Ok(l.clone()),
            (None, Some(z)) => Ok(vec![z]),
            (None, None) => bail!("--Z or --Z-range is required"),
        }
    }

    pub fn tfw_options(&self) -> TfwOptions {
        TfwOptions {
            tol: self.tol,
            nodes: self.nodes,
            r_min_factor: self.r_min_factor,
            r_max: self.r_max,
            ..TfwOptions::default()
        }
    }

    pub fn bounds_options(&self) -> BoundsOptions {
        BoundsOptions { lambda: self.lambda, beta: self.beta, tfw: self.tfw_options(), ..BoundsOptions::default() }
    }
}

fn load_file(path: &Path) -> anyhow::Result<Common> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// `a:b:step`, inclusive of `b` up to rounding; a bare number is a single value.
pub fn parse_range(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad number {p:?} in range {s:?}")))
        .collect::<anyhow::Result<_>>()?;
    let v = match parts.as_slice() {
        [a] => vec![*a],
        [a, b, step] => {
            if !(*step > 0.0) || b < a {
                bail!("range {s:?} must have a <= b and step > 0");
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            (0..=n).map(|i| a + i as f64 * step).collect()
        }
        _ => bail!("range {s:?} must be a:b:step"),
    };
    if v.iter().any(|z| !(*z > 0.0)) {
        bail!("charges in {s:?} must be positive");
    }
    Ok(v)
}
