//! `ldrop`: evaluate liquid drop energies, sweep binding curves and run the
//! numerical studies of the `liquid-drop` library from the command line.
//!
//! Exit status: 0 on success, 1 for configuration or input errors, 2 when a
//! required numerical stage fails.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_grid, parse_value, read_config_file, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ldrop",
    version,
    about = "Liquid drop energies: perimeter plus Coulomb self-energy"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Key-value file (`key = value`, keys as the long flags); flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Mass grid: `a,b,c` or `min:max:count[:lin|log]`.
    #[arg(long, global = true)]
    a_grid: Option<String>,
    /// Riesz exponent (1 = Coulomb).
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Ambient dimension.
    #[arg(long, global = true)]
    dim: Option<u32>,
    /// Voxel spacing for voxelized evaluations.
    #[arg(long, global = true)]
    voxel_h: Option<f64>,
    /// Highest Legendre degree of the shape search.
    #[arg(long, global = true)]
    legendre_order: Option<usize>,
    /// Gauss-Legendre order of the boundary integrals.
    #[arg(long, global = true)]
    quadrature_order: Option<usize>,
    /// Extra Nelder-Mead runs from a jittered incumbent.
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Iteration cap per Nelder-Mead run.
    #[arg(long, global = true)]
    max_iterations: Option<usize>,
    /// Relative spread of simplex energies at which a run stops.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Seed of the restart jitter (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Energy breakdown of a shape file.
    Energy { input: Option<PathBuf> },
    /// Shape-optimised upper bounds on E(A) over the mass grid, with checks.
    Curve,
    /// Separated-ball energies and the thresholds where the ball count changes.
    Dissociate {
        #[arg(long)]
        amax: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Number of thresholds a_1..a_n to tabulate.
        #[arg(long)]
        thresholds: Option<u64>,
    },
    /// Split a voxelized set along a sphere.
    Split {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        r_lo: Option<f64>,
        #[arg(long)]
        r_hi: Option<f64>,
        /// Use this radius instead of searching `[r-lo, r-hi]`.
        #[arg(long)]
        radius: Option<f64>,
        /// `x,y,z`.
        #[arg(long)]
        center: Option<String>,
    },
    /// Second-order energy change of the ball along one Legendre mode.
    Stability {
        #[arg(long)]
        mode: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Voxel refinement study of the unit ball.
    Converge {
        /// Comma-separated spacings.
        #[arg(long)]
        h: Option<String>,
    },
}

fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let mut file = match &cli.common.config {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };
    let c = cli.common;
    let mut set = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            file.insert(key.to_string(), v);
        }
    };
    set("a-grid", c.a_grid);
    set("lambda", c.lambda.map(|v| v.to_string()));
    set("dim", c.dim.map(|v| v.to_string()));
    set("voxel-h", c.voxel_h.map(|v| v.to_string()));
    set("legendre-order", c.legendre_order.map(|v| v.to_string()));
    set(
        "quadrature-order",
        c.quadrature_order.map(|v| v.to_string()),
    );
    set("restarts", c.restarts.map(|v| v.to_string()));
    set("max-iterations", c.max_iterations.map(|v| v.to_string()));
    set("tolerance", c.tolerance.map(|v| v.to_string()));
    set("seed", c.seed.map(|v| v.to_string()));
    set("out", c.out.map(|v| v.display().to_string()));
    let (command, extra_keys): (&str, &[&str]) = match cli.command {
        Command::Energy { input } => {
            set("input", input.map(|v| v.display().to_string()));
            ("energy", &["input"])
        }
        Command::Curve => ("curve", &[]),
        Command::Dissociate {
            amax,
            points,
            thresholds,
        } => {
            set("amax", amax.map(|v| v.to_string()));
            set("points", points.map(|v| v.to_string()));
            set("thresholds", thresholds.map(|v| v.to_string()));
            ("dissociate", &["amax", "points", "thresholds"])
        }
        Command::Split {
            input,
            r_lo,
            r_hi,
            radius,
            center,
        } => {
            set("input", input.map(|v| v.display().to_string()));
            set("r-lo", r_lo.map(|v| v.to_string()));
            set("r-hi", r_hi.map(|v| v.to_string()));
            set("radius", radius.map(|v| v.to_string()));
            set("center", center);
            ("split", &["input", "r-lo", "r-hi", "radius", "center"])
        }
        Command::Stability { mode, eps } => {
            set("mode", mode.map(|v| v.to_string()));
            set("eps", eps.map(|v| v.to_string()));
            ("stability", &["mode", "eps"])
        }
        Command::Converge { h } => {
            set("h", h);
            ("converge", &["h"])
        }
    };

    let get = |key: &str| file.get(key).map(String::as_str);
    let default_grid = match command {
        "stability" => "1:20:20",
        _ => "1:20:8",
    };
    let defaults = liquid_drop::curve::OptimizerConfig::default();
    let cfg = RunConfig {
        command: command.to_string(),
        a_grid: parse_grid(get("a-grid").unwrap_or(default_grid))?,
        lambda: get("lambda").map_or(Ok(1.0), |v| parse_value("lambda", v))?,
        dim: get("dim").map_or(Ok(3), |v| parse_value("dim", v))?,
        voxel_h: get("voxel-h").map_or(Ok(0.1), |v| parse_value("voxel-h", v))?,
        legendre_order: get("legendre-order").map_or(Ok(defaults.legendre_order), |v| {
            parse_value("legendre-order", v)
        })?,
        quadrature_order: get("quadrature-order").map_or(Ok(defaults.quadrature_order), |v| {
            parse_value("quadrature-order", v)
        })?,
        restarts: get("restarts").map_or(Ok(defaults.restarts), |v| parse_value("restarts", v))?,
        max_iterations: get("max-iterations").map_or(Ok(defaults.max_iterations), |v| {
            parse_value("max-iterations", v)
        })?,
        tolerance: get("tolerance")
            .map_or(Ok(defaults.tolerance), |v| parse_value("tolerance", v))?,
        seed: get("seed").map_or(Ok(0), |v| parse_value("seed", v))?,
        extra: extra_keys
            .iter()
            .filter_map(|k| file.get(*k).map(|v| (k.to_string(), v.clone())))
            .collect(),
        out: PathBuf::from(get("out").unwrap_or("ldrop-out")),
    };
    if !(cfg.voxel_h > 0.0 && cfg.voxel_h.is_finite()) {
        return Err(CliError::Config(format!(
            "voxel-h must be positive, got {}",
            cfg.voxel_h
        )));
    }
    liquid_drop::RieszParams::new(cfg.dim, cfg.lambda)
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = resolve(cli).and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ldrop: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
