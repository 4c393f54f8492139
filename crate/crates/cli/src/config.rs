//! Flat `key = value` experiment configs with command-line overrides.

use anyhow::{anyhow, bail, Context, Result};
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

#[derive(Debug)]
pub struct Config {
    values: BTreeMap<String, String>,
    /// Every key read, with the value actually used.
    resolved: RefCell<BTreeMap<String, String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value", n + 1))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                bail!("line {}: empty key", n + 1);
            }
            if values.insert(k.to_string(), v.to_string()).is_some() {
                bail!("line {}: duplicate key `{k}`", n + 1);
            }
        }
        Ok(Self { values, resolved: RefCell::new(BTreeMap::new()) })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    /// Applies `key=value` overrides on top of the file.
    pub fn override_with(&mut self, pairs: &[String]) -> Result<()> {
        for p in pairs {
            let (k, v) = p.split_once('=').ok_or_else(|| anyhow!("override `{p}` is not key=value"))?;
            self.values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(())
    }

    fn record(&self, key: &str, value: &str) {
        self.resolved.borrow_mut().insert(key.to_string(), value.to_string());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn string(&self, key: &str, default: &str) -> String {
        let v = self.raw(key).unwrap_or(default).to_string();
        self.record(key, &v);
        v
    }

    pub fn real(&self, key: &str, default: &str) -> Result<f64> {
        let v = self.string(key, default);
        parse_real(&v).with_context(|| format!("key `{key}`"))
    }

    pub fn optional_real(&self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            Some(_) => self.real(key, "").map(Some),
            None => Ok(None),
        }
    }

    pub fn count(&self, key: &str, default: &str) -> Result<usize> {
        let v = self.string(key, default);
        v.parse().with_context(|| format!("key `{key}`: `{v}` is not a nonnegative integer"))
    }

    pub fn reals(&self, key: &str, default: &str) -> Result<Vec<f64>> {
        let v = self.string(key, default);
        split_list(&v).map(|s| parse_real(s).with_context(|| format!("key `{key}`"))).collect()
    }

    pub fn strings(&self, key: &str, default: &str) -> Vec<String> {
        let v = self.string(key, default);
        split_list(&v).map(str::to_string).collect()
    }

    /// All `prefix.name = value` entries, as `name=value;…` in key order.
    pub fn group(&self, prefix: &str) -> String {
        let dotted = format!("{prefix}.");
        let parts: Vec<String> = self
            .values
            .iter()
            .filter_map(|(k, v)| k.strip_prefix(&dotted).map(|name| (k, name, v)))
            .map(|(k, name, v)| {
                self.record(k, v);
                format!("{name}={v}")
            })
            .collect();
        parts.join(";")
    }

    /// Fails on keys no experiment step read, which are almost always typos.
    pub fn reject_unused(&self) -> Result<()> {
        let resolved = self.resolved.borrow();
        let unused: Vec<&str> = self.values.keys().filter(|k| !resolved.contains_key(*k)).map(String::as_str).collect();
        if !unused.is_empty() {
            bail!("unknown config keys: {}", unused.join(", "));
        }
        Ok(())
    }

    pub fn resolved(&self) -> BTreeMap<String, String> {
        self.resolved.borrow().clone()
    }
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_atom(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some(k) = s.strip_suffix("pi") {
        let k = k.trim().trim_end_matches('*');
        let k = if k.is_empty() { 1.0 } else { parse_atom(k)? };
        return Ok(k * PI);
    }
    s.parse::<f64>().map_err(|_| anyhow!("`{s}` is not a number"))
}

/// A number, a fraction `a/b`, or either with a `pi` factor (`pi/4`).
pub fn parse_real(s: &str) -> Result<f64> {
    let v = match s.split_once('/') {
        Some((a, b)) => parse_atom(a)? / parse_atom(b)?,
        None => parse_atom(s)?,
    };
    if !v.is_finite() {
        bail!("`{s}` is not finite");
    }
    Ok(v)
}
