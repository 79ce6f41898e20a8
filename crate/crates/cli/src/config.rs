//! Run configuration: command-line flags layered over an optional TOML file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::ValueEnum;
use serde::Deserialize;

use crate::UsageError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Keys accepted in the configuration file. Every key mirrors a flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub degree: Option<toml::Value>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub force: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(toml::from_str(&text).map_err(|e| UsageError::new(format!("{}: {e}", path.display())))?)
    }

    /// The `degree` key as flag text: an integer, a list of integers, or a string.
    pub fn degree_text(&self) -> anyhow::Result<Option<String>> {
        let Some(v) = &self.degree else { return Ok(None) };
        let text = match v {
            toml::Value::Integer(k) => k.to_string(),
            toml::Value::String(s) => s.clone(),
            toml::Value::Array(items) => items
                .iter()
                .map(|x| x.as_integer().map(|k| k.to_string()).ok_or_else(|| UsageError::new("degree entries must be integers")))
                .collect::<Result<Vec<_>, _>>()?
                .join(","),
            _ => bail!(UsageError::new("degree must be an integer, a list or a string")),
        };
        Ok(Some(text))
    }
}

/// Fully resolved settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: usize,
    pub degree: Option<String>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub force: bool,
}

pub const DEFAULT_SEED: u64 = 20240917;

impl RunConfig {
    pub fn resolve(flags: &crate::GlobalArgs) -> anyhow::Result<Self> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let n = flags.n.or(file.n).unwrap_or(2);
        if !(2..=6).contains(&n) {
            bail!(UsageError::new(format!("n = {n} is outside 2..=6")));
        }
        Ok(RunConfig {
            n,
            degree: flags.degree.clone().or(file.degree_text()?),
            format: flags.format.or(file.format).unwrap_or_default(),
            out: flags.out.clone().or(file.out),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            jobs: flags.jobs.or(file.jobs),
            force: flags.force || file.force.unwrap_or(false),
        })
    }

    /// The degree as a color vector of length `n`.
    pub fn degree_vector(&self) -> anyhow::Result<Vec<usize>> {
        let text = self.degree.as_deref().ok_or_else(|| UsageError::new("--degree is required, e.g. --degree 1,0"))?;
        let d = parse_list(text)?;
        if d.len() != self.n {
            bail!(UsageError::new(format!("degree {text:?} has {} entries, expected n = {}", d.len(), self.n)));
        }
        Ok(d)
    }

    /// The degree as a bound on `|d|`.
    pub fn degree_bound(&self, default: usize) -> anyhow::Result<usize> {
        match self.degree.as_deref() {
            None => Ok(default),
            Some(text) => text
                .trim()
                .parse()
                .map_err(|_| UsageError::new(format!("degree bound {text:?} is not a nonnegative integer")).into()),
        }
    }
}

pub fn parse_list(text: &str) -> anyhow::Result<Vec<usize>> {
    text.split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| UsageError::new(format!("{text:?} is not a comma-separated list of nonnegative integers")).into())
}
