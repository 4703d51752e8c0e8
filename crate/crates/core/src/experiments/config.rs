//! `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

/// Keys accepted in configuration files and, with `-` for `_`, as flags.
pub const KNOWN_KEYS: &[&str] = &[
    "checkpoints",
    "command",
    "convention",
    "dim",
    "ds",
    "ensemble",
    "estimator",
    "exact",
    "family",
    "functional",
    "graph",
    "horizon",
    "level",
    "mode",
    "n_list",
    "nmax",
    "nmin",
    "out",
    "particles",
    "radius",
    "replicates",
    "seed",
    "start",
    "steps",
    "weight",
    "workers",
];

/// Keys that do not affect results and stay out of the hash.
const UNHASHED: &[&str] = &["out", "workers"];

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    value: String,
    /// Line in the source file; 0 for values set programmatically.
    line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    source: PathBuf,
    entries: BTreeMap<String, Entry>,
}

impl Config {
    pub fn new() -> Self {
        Config { source: PathBuf::from("<command line>"), entries: BTreeMap::new() }
    }

    /// Parse `key = value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str, source: &Path) -> Result<Self> {
        let mut cfg = Config { source: source.to_path_buf(), entries: BTreeMap::new() };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| LabError::Parse { path: source.to_path_buf(), line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(err(format!("expected `key = value`, found `{content}`")));
            };
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(err(format!("key `{key}` has an empty value")));
            }
            if let Some(prev) = cfg.entries.get(&key) {
                return Err(err(format!("key `{key}` already set on line {}", prev.line)));
            }
            cfg.entries.insert(key, Entry { value: value.to_string(), line });
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LabError::Io { path: path.to_path_buf(), source })?;
        Config::parse(&text, path)
    }

    /// Set or override a key.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let key = key.replace('-', "_");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(LabError::param(format!("unknown key `{key}`")));
        }
        self.entries.insert(key, Entry { value: value.into(), line: 0 });
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn invalid(&self, key: &str, entry: &Entry, why: String) -> LabError {
        if entry.line > 0 {
            LabError::Parse { path: self.source.clone(), line: entry.line, message: format!("invalid value for `{key}`: {why}") }
        } else {
            LabError::param(format!("invalid value for `{key}`: {why}"))
        }
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|err: T::Err| self.invalid(key, e, format!("`{}`: {err}", e.value))),
        }
    }

    pub fn parsed_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    pub fn required<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.parsed(key)?.ok_or_else(|| LabError::param(format!("missing required key `{key}`")))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .split(',')
                .map(|s| s.trim().parse().map_err(|err: T::Err| self.invalid(key, e, format!("`{}`: {err}", s.trim()))))
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    /// Sorted `key=value` lines of the result-affecting keys.
    pub fn canonical(&self) -> String {
        self.entries
            .iter()
            .filter(|(k, _)| !UNHASHED.contains(&k.as_str()))
            .map(|(k, e)| format!("{k}={}\n", e.value))
            .collect()
    }

    /// Hex SHA-256 of [`Config::canonical`].
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
