//! Run configuration: command-line flags layered over an optional key-value file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Values every subcommand may use, after merging the config file and flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub a_grid: Vec<f64>,
    pub lambda: f64,
    pub dim: u32,
    pub voxel_h: f64,
    pub legendre_order: usize,
    pub quadrature_order: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Command-specific settings, stored as given.
    pub extra: BTreeMap<String, String>,
    #[serde(skip)]
    pub out: PathBuf,
}

/// Keys accepted in a config file, with the flag each one mirrors.
pub const KEYS: &[&str] = &[
    "a-grid",
    "lambda",
    "dim",
    "voxel-h",
    "legendre-order",
    "quadrature-order",
    "restarts",
    "max-iterations",
    "tolerance",
    "seed",
    "out",
    "amax",
    "points",
    "thresholds",
    "h",
    "mode",
    "eps",
    "input",
    "r-lo",
    "r-hi",
    "radius",
    "center",
];

/// `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "config line {}: expected `key = value`",
                i + 1
            )));
        };
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "config line {}: unknown key `{}`",
                i + 1,
                k.trim()
            )));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value `{value}` for {key}")))
}

pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

/// `a,b,c` or `min:max:count[:lin|log]`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let grid = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(CliError::Config(format!(
                "grid `{spec}`: expected min:max:count[:lin|log]"
            )));
        }
        let lo: f64 = parse_value("a-grid", parts[0])?;
        let hi: f64 = parse_value("a-grid", parts[1])?;
        let n: usize = parse_value("a-grid", parts[2])?;
        let log = match parts.get(3).map(|s| s.trim()) {
            None | Some("lin") => false,
            Some("log") => true,
            Some(other) => {
                return Err(CliError::Config(format!(
                    "grid spacing `{other}`: expected lin or log"
                )))
            }
        };
        if n == 0 {
            return Err(CliError::Config("grid needs at least one point".into()));
        }
        if n == 1 {
            vec![lo]
        } else if log {
            if !(lo > 0.0) {
                return Err(CliError::Config("log grid needs a positive minimum".into()));
            }
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        } else {
            (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect()
        }
    } else {
        parse_list("a-grid", spec)?
    };
    if grid.is_empty() {
        return Err(CliError::Config("empty grid".into()));
    }
    for (i, &a) in grid.iter().enumerate() {
        if !(a > 0.0 && a.is_finite()) {
            return Err(CliError::Config(format!("grid value {a} is not positive")));
        }
        if i > 0 && a <= grid[i - 1] {
            return Err(CliError::Config("grid must be strictly increasing".into()));
        }
    }
    Ok(grid)
}

impl RunConfig {
    pub fn extra_value<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.extra.get(key) {
            Some(v) => parse_value(key, v),
            None => Ok(default),
        }
    }

    /// Hex SHA-256 of the resolved configuration, output directory excluded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serialises");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
