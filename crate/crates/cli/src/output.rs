use anyhow::{Context, Result};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

/// One declared tolerance and whether it held.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub detail: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), detail: detail.into(), pass }
    }
}

/// A gnuplot curve: whitespace-separated `(x, y)` pairs.
#[derive(Debug, Clone)]
pub struct Curve {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Everything an experiment produces before it is written out.
pub struct Outcome {
    pub csv: Vec<u8>,
    pub payload: serde_json::Value,
    pub curves: Vec<Curve>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner().context("flushing CSV")?)
}

fn dat_text(c: &Curve) -> String {
    let mut s = String::new();
    for (x, y) in &c.points {
        let _ = writeln!(s, "{x} {y}");
    }
    s
}

#[derive(Serialize)]
struct Report<'a> {
    experiment: &'a str,
    seed: u64,
    config: &'a std::collections::BTreeMap<String, String>,
    result: &'a serde_json::Value,
    checks: &'a [Check],
    verdict: &'static str,
}

/// Writes `<name>.csv`, `<name>.json` and `<name>_<curve>.dat` into `dir`.
pub fn write_all(
    dir: &Path,
    name: &str,
    seed: u64,
    config: &std::collections::BTreeMap<String, String>,
    out: &Outcome,
) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    let mut written = Vec::new();
    let mut put = |file: String, bytes: &[u8]| -> Result<()> {
        let path = dir.join(file);
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
        Ok(())
    };
    put(format!("{name}.csv"), &out.csv)?;
    let report = Report {
        experiment: name,
        seed,
        config,
        result: &out.payload,
        checks: &out.checks,
        verdict: if out.passed() { "PASS" } else { "FAIL" },
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    put(format!("{name}.json"), json.as_bytes())?;
    for c in &out.curves {
        put(format!("{name}_{}.dat", c.name), dat_text(c).as_bytes())?;
    }
    Ok(written)
}
