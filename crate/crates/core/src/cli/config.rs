//! Flat `key = value` sweep configuration files.
//!
//! ```text
//! # phase map at h = 24
//! alpha_grid = 0.25, 0.5, 1.0
//! h_grid = 24
//! trials = 10000
//! seed = 7
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiments::{Format, SweepConfig, SweepMode, DEFAULT_TRIALS};
use crate::expr::HExpr;

/// A parsed configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub sweep: SweepConfig,
    /// Keys that were absent and took their default value.
    pub defaulted: Vec<&'static str>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

pub const KEYS: [&str; 13] = [
    "alpha_grid",
    "h_grid",
    "eps",
    "trials",
    "seed",
    "mode",
    "beta",
    "z",
    "workers",
    "cap",
    "levels",
    "out",
    "format",
];

fn list<T: std::str::FromStr>(value: &str) -> std::result::Result<Vec<T>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("cannot parse '{s}'")))
        .collect()
}

fn one<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse '{value}'"))
}

pub fn parse_config(text: &str, path: &Path) -> Result<LoadedConfig> {
    let mut sweep = SweepConfig {
        alpha_grid: Vec::new(),
        h_grid: Vec::new(),
        ..SweepConfig::default()
    };
    let mut seen: Vec<&str> = Vec::new();
    let (mut out, mut format) = (None, None);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Config {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected 'key = value', found '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let key = match key {
            "trials_per_point" => "trials",
            "master_seed" => "seed",
            k => k,
        };
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(err(format!("unknown key '{key}'")));
        };
        if seen.contains(&known) {
            return Err(err(format!("duplicate key '{key}'")));
        }
        seen.push(known);
        let parsed: std::result::Result<(), String> = (|| {
            match known {
                "alpha_grid" => sweep.alpha_grid = list(value)?,
                "h_grid" => sweep.h_grid = list(value)?,
                "eps" => sweep.eps = one(value)?,
                "trials" => sweep.trials_per_point = one(value)?,
                "seed" => sweep.master_seed = one(value)?,
                "mode" => sweep.mode = value.parse::<SweepMode>().map_err(|e| e.to_string())?,
                "beta" => sweep.beta = Some(HExpr::parse(value).map_err(|e| e.to_string())?),
                "z" => sweep.z = one(value)?,
                "workers" => sweep.workers = one(value)?,
                "cap" => sweep.cap = one(value)?,
                "levels" => sweep.levels = one(value)?,
                "out" => out = Some(PathBuf::from(value)),
                _ => format = Some(value.parse::<Format>().map_err(|e| e.to_string())?),
            }
            Ok(())
        })();
        parsed.map_err(err)?;
    }
    let defaulted = if seen.contains(&"trials") {
        Vec::new()
    } else {
        sweep.trials_per_point = DEFAULT_TRIALS;
        vec!["trials"]
    };
    Ok(LoadedConfig {
        sweep,
        defaulted,
        out,
        format,
    })
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.to_path_buf(),
        line: 0,
        msg: e.to_string(),
    })?;
    parse_config(&text, path)
}
