//! Flat key/value experiment configuration with typed lookup.
//!
//! Files hold `key = value` lines (# starts a comment). Values read through
//! the typed getters are validated on access; every key that was read,
//! together with the default used when absent, is echoed into the run
//! metadata so a summary can always be reproduced from its metadata file.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    /// key -> value actually used (explicit or default), echoed to metadata
    used: RefCell<BTreeMap<String, String>>,
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("config line {} is not `key = value`: {raw:?}", lineno + 1);
            };
            cfg.values
                .insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn record(&self, key: &str, value: String) {
        self.used.borrow_mut().insert(key.to_string(), value);
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        let v = match self.values.get(key) {
            Some(s) => s
                .parse::<f64>()
                .with_context(|| format!("config key {key}: bad float {s:?}"))?,
            None => default,
        };
        self.record(key, format!("{v}"));
        Ok(v)
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize> {
        let v = match self.values.get(key) {
            Some(s) => s
                .parse::<usize>()
                .with_context(|| format!("config key {key}: bad integer {s:?}"))?,
            None => default,
        };
        self.record(key, format!("{v}"));
        Ok(v)
    }

    pub fn get_str(&self, key: &str, default: &str) -> String {
        let v = self
            .values
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string());
        self.record(key, v.clone());
        v
    }

    /// Comma-separated float list; `default` used when the key is absent.
    pub fn get_f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let v = match self.values.get(key) {
            Some(s) if s.trim().is_empty() => Vec::new(),
            Some(s) => s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .with_context(|| format!("config key {key}: bad float {t:?}"))
                })
                .collect::<Result<Vec<_>>>()?,
            None => default.to_vec(),
        };
        self.record(
            key,
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(","),
        );
        Ok(v)
    }

    /// Everything echoed so far (explicit values and applied defaults).
    pub fn used_entries(&self) -> BTreeMap<String, String> {
        self.used.borrow().clone()
    }

    /// Keys present in the file/flags but never consulted: typo guard.
    pub fn unused_keys(&self) -> Vec<String> {
        let used = self.used.borrow();
        self.values
            .keys()
            .filter(|k| !used.contains_key(*k))
            .cloned()
            .collect()
    }
}
