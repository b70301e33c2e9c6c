use anyhow::Result;
use ramp_storage::backtest::{monte_carlo_value, run_policy, sample_prices};
use ramp_storage::finite::{compute_thresholds, storage_value};
use ramp_storage::rng;
use ramp_storage::sweep::{value_sweep, Family, SweepBase};
use serde::Serialize;
use serde_json::Value;

use super::{at_least_one, positive, problem, Seeds};
use crate::args::{SimulateArgs, SweepArgs, SweepFamily, ThresholdsArgs};
use crate::law::Law;
use crate::report::{num, Report};

fn default_law() -> Law {
    Law::lognormal(50.0, 20.0, 100, 0.0, 170.0)
}

#[derive(Serialize)]
struct Storage {
    prices: Law,
    n_stages: usize,
    vbar: f64,
    n: usize,
    salvage: f64,
}

pub fn thresholds(a: ThresholdsArgs) -> Result<Report> {
    let law = a.prices.resolve(&default_law())?;
    let cfg = problem(law.pmf()?, a.n_stages.unwrap_or(24), a.vbar.unwrap_or(1.0), a.n.unwrap_or(4), a.salvage)?;
    let resolved = Storage { prices: law, n_stages: cfg.n_stages, vbar: cfg.vbar, n: cfg.n, salvage: cfg.salvage };

    let tbl = compute_thresholds(&cfg)?;
    let mut r = Report::new("thresholds", &resolved, None, &["stage", "segment", "threshold", "intercept"]);
    r.summary("storage_value", num(storage_value(&cfg)?));
    r.summary("capacity", num(cfg.capacity()));
    for (k, i, t, e) in tbl.rows() {
        r.row(vec![k.into(), i.into(), num(t), num(e)]);
    }
    Ok(r)
}

#[derive(Serialize)]
struct Simulation {
    #[serde(flatten)]
    storage: Storage,
    n_paths: usize,
    trajectories: usize,
}

pub fn simulate(a: SimulateArgs, seeds: &Seeds) -> Result<Report> {
    let law = a.prices.resolve(&default_law())?;
    let cfg = problem(law.pmf()?, a.n_stages.unwrap_or(24), a.vbar.unwrap_or(1.0), a.n.unwrap_or(4), a.salvage)?;
    let resolved = Simulation {
        storage: Storage { prices: law, n_stages: cfg.n_stages, vbar: cfg.vbar, n: cfg.n, salvage: cfg.salvage },
        n_paths: at_least_one("n_paths", a.n_paths.unwrap_or(10_000))?,
        trajectories: a.trajectories.unwrap_or(1),
    };
    let seed = seeds.take();

    let est = monte_carlo_value(&cfg, resolved.n_paths, seed)?;
    let exact = storage_value(&cfg)?;
    let tbl = compute_thresholds(&cfg)?;
    let mut r = Report::new("simulate", &resolved, Some(seed), &["path", "stage", "price", "state", "action"]);
    r.summary("mean_profit_per_stage", num(est.mean));
    r.summary("std_error", num(est.std_error));
    r.summary("paths", est.samples);
    r.summary("storage_value", num(exact));
    // path p of the table is the same draw as path p of the estimate
    for p in 0..resolved.trajectories {
        let prices = sample_prices(&cfg, &mut rng::stream(seed, p as u64));
        let t = run_policy(&tbl, &cfg, &prices, 0.0)?;
        for (k, (&price, &action)) in t.prices.iter().zip(&t.actions).enumerate() {
            r.row(vec![p.into(), k.into(), num(price), num(t.states[k]), num(action)]);
        }
        r.row(vec![p.into(), cfg.n_stages.into(), Value::Null, num(t.states[cfg.n_stages]), Value::Null]);
    }
    Ok(r)
}

#[derive(Serialize)]
struct Sweep {
    ns: Vec<usize>,
    sigmas: Vec<f64>,
    family: SweepFamily,
    mean: f64,
    support_points: usize,
    truncation_sigmas: f64,
    n_stages: usize,
    vbar: f64,
}

pub fn sweep(a: SweepArgs) -> Result<Report> {
    let defaults = SweepBase::default();
    let resolved = Sweep {
        ns: a.ns.unwrap_or_else(|| vec![1, 2, 3, 5, 10, 20, 40]),
        sigmas: a.sigmas.unwrap_or_else(|| (0..=8).map(|k| 5.0 * k as f64).collect()),
        family: a.family.unwrap_or(SweepFamily::Lognormal),
        mean: positive("mean", a.mean.unwrap_or(defaults.mean))?,
        support_points: a.support_points.unwrap_or(defaults.support_points),
        truncation_sigmas: positive("truncation_sigmas", a.truncation_sigmas.unwrap_or(defaults.truncation_sigmas))?,
        n_stages: at_least_one("n_stages", a.n_stages.unwrap_or(defaults.n_stages))?,
        vbar: positive("vbar", a.vbar.unwrap_or(defaults.vbar))?,
    };
    if resolved.ns.is_empty() || resolved.sigmas.is_empty() {
        return Err(crate::error::config("ns and sigmas must be non-empty"));
    }
    let base = SweepBase {
        family: match resolved.family {
            SweepFamily::Lognormal => Family::LogNormal,
            SweepFamily::Uniform => Family::Uniform,
            SweepFamily::TwoPoint => Family::TwoPoint,
        },
        mean: resolved.mean,
        support_points: resolved.support_points,
        truncation_sigmas: resolved.truncation_sigmas,
        n_stages: resolved.n_stages,
        vbar: resolved.vbar,
    };

    let cells = value_sweep(&resolved.ns, &resolved.sigmas, &base);
    let mut r = Report::new("value-sweep", &resolved, None, &["n", "sigma", "value"]);
    let failed: Vec<Value> = cells
        .iter()
        .filter_map(|c| c.error.as_ref().map(|e| serde_json::json!({ "n": c.n, "sigma": c.sigma, "error": e })))
        .collect();
    r.summary("failed_cells", failed.len());
    r.summary("failures", failed);
    for c in &cells {
        r.row(vec![c.n.into(), num(c.sigma), c.value.map_or(Value::Null, num)]);
    }
    Ok(r)
}
