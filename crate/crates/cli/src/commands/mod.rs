mod backtest;
mod elasticity;
mod finite;
mod infinite;
mod reserves;

use std::io::Write;

use anyhow::Result;
use ramp_storage::finite::ProblemConfig;
use ramp_storage::price::PricePmf;
use ramp_storage::{exec, rng};

use crate::args::{Cli, Command, Format};
use crate::config::ConfigFile;
use crate::error::{config, usage};
use crate::report::Report;

/// Seed handling for randomized subcommands.
pub struct Seeds {
    given: Option<u64>,
}

impl Seeds {
    /// The configured seed, or a fresh one announced on stderr.
    pub fn take(&self) -> u64 {
        self.given.unwrap_or_else(|| {
            let seed = rng::fresh_seed();
            eprintln!("{}", serde_json::json!({ "note": "generated seed", "seed": seed }));
            seed
        })
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let file = ConfigFile::load(cli.global.config.as_deref())?;
    let g = &file.globals;
    let format = cli.global.format.or(g.format).unwrap_or(Format::Csv);
    let output = cli.global.output.clone().or_else(|| g.output.clone());
    if let Some(t) = cli.global.threads.or(g.threads) {
        if t == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        exec::cap_threads(t).map_err(usage)?;
    }
    let seeds = Seeds { given: cli.global.seed.or(g.seed) };

    let name = cli.command.name();
    let report = match &cli.command {
        Command::Thresholds(a) => finite::thresholds(file.layer(name, a)?)?,
        Command::Simulate(a) => finite::simulate(file.layer(name, a)?, &seeds)?,
        Command::CompetitiveRatio(a) => backtest::competitive(file.layer(name, a)?)?,
        Command::ValueSweep(a) => finite::sweep(file.layer(name, a)?)?,
        Command::Bound(a) => infinite::bound(file.layer(name, a)?)?,
        Command::TwoPoint(a) => infinite::two_point(file.layer(name, a)?)?,
        Command::Stationary(a) => infinite::stationary(file.layer(name, a)?, &seeds)?,
        Command::PhaseMap(a) => infinite::phase(file.layer(name, a)?)?,
        Command::Elasticity(a) => elasticity::elasticity(file.layer(name, a)?, &seeds)?,
        Command::Reserves(a) => reserves::reserves(file.layer(name, a)?, &seeds)?,
    };
    emit(&report, format, output.as_deref())
}

fn emit(report: &Report, format: Format, output: Option<&std::path::Path>) -> Result<()> {
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv()?,
    };
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// i.i.d. finite-horizon problem, validated before any computation.
fn problem(pmf: PricePmf, n_stages: usize, vbar: f64, n: usize, salvage: Option<f64>) -> Result<ProblemConfig> {
    let cfg = ProblemConfig::iid(pmf, n_stages, vbar, n);
    let cfg = match salvage {
        Some(s) => cfg.with_salvage(s),
        None => cfg,
    };
    cfg.validate().map_err(config)?;
    Ok(cfg)
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(config(format!("{name} must be positive, got {x}")))
    }
}

fn at_least_one(name: &str, x: usize) -> Result<usize> {
    if x >= 1 {
        Ok(x)
    } else {
        Err(config(format!("{name} must be at least 1")))
    }
}
