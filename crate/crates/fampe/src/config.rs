//! Line-based `key = value` configuration files and the value-resolution
//! order: command-line flag > config file > `FAMPE_SEED` (seed only) >
//! built-in default.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};
use crate::fsutil;

#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!(
                    "config line {}: expected `key = value`, got {line:?}",
                    lineno + 1
                ))
            })?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        Self::parse(&fsutil::read_text(path)?)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                CliError::config(format!("config key {key:?}: cannot parse value {raw:?}"))
            }),
        }
    }

    /// Flag beats file beats default.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        Ok(flag.or(self.get(key)?).unwrap_or(default))
    }

    /// Like [`resolve`](Self::resolve) but with no default.
    pub fn resolve_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        Ok(flag.or(self.get(key)?))
    }

    /// Seed resolution additionally consults `FAMPE_SEED` below the file.
    pub fn resolve_seed(&self, flag: Option<u64>) -> CliResult<u64> {
        if let Some(seed) = self.resolve_opt(flag, "seed")? {
            return Ok(seed);
        }
        match std::env::var("FAMPE_SEED") {
            Ok(raw) => raw
                .parse()
                .map_err(|_| CliError::config(format!("FAMPE_SEED: cannot parse {raw:?}"))),
            Err(_) => Ok(0),
        }
    }
}

/// Parse a comma-separated list of floats (for `--alphas`).
pub fn parse_float_list(raw: &str) -> CliResult<Vec<f64>> {
    raw.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::config(format!("cannot parse {p:?} as a number")))
        })
        .collect()
}
