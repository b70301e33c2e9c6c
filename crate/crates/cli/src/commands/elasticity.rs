use anyhow::Result;
use ramp_storage::elasticity::{arc_ped, average_response_with, isotonic_residual, ped_curve, ResponseOptions};
use serde::Serialize;
use serde_json::Value;

use super::{at_least_one, positive, problem, Seeds};
use crate::args::ElasticityArgs;
use crate::law::Law;
use crate::report::{num, Report};

#[derive(Serialize)]
struct Elasticity {
    prices: Law,
    n_stages: usize,
    vbar: f64,
    n: usize,
    salvage: f64,
    n_paths: usize,
    n_bins: usize,
    d_firm: f64,
}

pub fn elasticity(a: ElasticityArgs, seeds: &Seeds) -> Result<Report> {
    let law = a.prices.resolve(&Law::lognormal(52.0, 22.0, 140, 0.0, 160.0))?;
    let vbar = positive("vbar", a.vbar.unwrap_or(10.0))?;
    let cfg = problem(law.pmf()?, a.n_stages.unwrap_or(288), vbar, a.n.unwrap_or(5), a.salvage)?;
    let resolved = Elasticity {
        prices: law,
        n_stages: cfg.n_stages,
        vbar,
        n: cfg.n,
        salvage: cfg.salvage,
        n_paths: at_least_one("n_paths", a.n_paths.unwrap_or(10_000))?,
        n_bins: at_least_one("n_bins", a.n_bins.unwrap_or(40))?,
        d_firm: positive("d_firm", a.d_firm.unwrap_or(3.0 * vbar))?,
    };
    let seed = seeds.take();

    let curve = average_response_with(&cfg, ResponseOptions::new(resolved.n_paths, resolved.n_bins, seed))?;
    let ped = ped_curve(&curve, resolved.d_firm)?;
    let pmf = cfg.pmf(0);
    let (lo, hi) = (pmf.mean() - pmf.std() / 2.0, pmf.mean() + pmf.std() / 2.0);
    let mut r = Report::new("elasticity", &resolved, Some(seed), &["price", "avg_response", "count", "ped"]);
    r.summary("isotonic_residual", num(isotonic_residual(&curve)));
    r.summary("near_mean_ped", if hi > lo { num(arc_ped(&curve, resolved.d_firm, lo, hi)?) } else { Value::Null });
    r.summary("near_mean_window", [num(lo), num(hi)]);
    r.summary("skipped_bins", ped.skipped.len());
    for ((&price, resp), &count) in curve.price_bins.iter().zip(&curve.avg_response).zip(&curve.sample_counts) {
        let e = resp.and_then(|_| ped.points.iter().find(|p| p.price == price)).map_or(Value::Null, |p| num(p.ped));
        r.row(vec![num(price), resp.map_or(Value::Null, num), count.into(), e]);
    }
    Ok(r)
}
