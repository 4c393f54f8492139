mod config;
mod experiments;
mod output;
mod pool;

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use config::Config;
use experiments::{Ctx, ALL};
use std::path::PathBuf;
use std::process::ExitCode;

/// Runs grid experiments on Poincaré constants and domain hypotheses.
#[derive(Parser, Debug)]
#[command(name = "poincare-lab", version)]
struct Cli {
    /// Experiment to run; omit to list them.
    experiment: Option<String>,
    /// `key=value` overrides applied on top of the config file.
    overrides: Vec<String>,
    /// Experiment config (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Overrides the config's `seed` key.
    #[arg(long)]
    seed: Option<u64>,
    /// Machine-readable listing or summary on stdout.
    #[arg(long)]
    json: bool,
}

fn list(json: bool) -> Result<()> {
    if json {
        let items: Vec<_> = ALL.iter().map(|e| serde_json::json!({ "name": e.name, "description": e.about })).collect();
        println!("{}", serde_json::to_string_pretty(&items)?);
    } else {
        for e in ALL {
            println!("{:<18} {}", e.name, e.about);
        }
    }
    Ok(())
}

/// `Ok(true)` when every check passed.
fn run(cli: &Cli, name: &str) -> Result<bool> {
    let exp = experiments::find(name)
        .ok_or_else(|| anyhow!("unknown experiment `{name}`; run without arguments to list them"))?;
    let path = cli.config.as_ref().context("--config is required to run an experiment")?;
    let mut cfg = Config::load(path)?;
    cfg.override_with(&cli.overrides)?;
    if let Some(named) = cfg.raw("experiment") {
        if named != name {
            bail!("config names experiment `{named}`, command line asks for `{name}`");
        }
        cfg.string("experiment", name);
    }
    if let Some(s) = cli.seed {
        cfg.override_with(&[format!("seed={s}")])?;
    }
    let seed = cfg.count("seed", "0")? as u64;
    let ctx = Ctx { seed, jobs: cli.jobs.max(1) };
    let out = (exp.run)(&cfg, &ctx).with_context(|| format!("experiment {name}"))?;
    let written = output::write_all(&cli.out, name, seed, &cfg.resolved(), &out)?;
    if cli.json {
        let summary = serde_json::json!({
            "experiment": name,
            "checks": out.checks,
            "verdict": if out.passed() { "PASS" } else { "FAIL" },
            "files": written,
        });
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        for c in &out.checks {
            println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        println!("{name}: {}", if out.passed() { "PASS" } else { "FAIL" });
    }
    Ok(out.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.experiment {
        None => list(cli.json).map(|_| true),
        Some(name) => run(&cli, name),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
