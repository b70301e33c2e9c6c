use anyhow::Result;
use ramp_storage::infinite::{
    fixed_mean_optimum, h_star_closed_form, phase_map, policy_iteration, relative_value_iteration_with,
    simulate_stationary, two_point_analysis, v_inf_max_bound, RviOptions, StationarySolution,
};
use ramp_storage::price::PricePmf;
use serde::Serialize;
use serde_json::Value;

use super::{at_least_one, positive, Seeds};
use crate::args::{BoundArgs, Engine, PhaseMapArgs, SolverArgs, StationaryArgs, TwoPointArgs};
use crate::error::config;
use crate::law::Law;
use crate::report::{num, Report};

#[derive(Serialize)]
struct Interval {
    vbar: f64,
    n: usize,
    lo: f64,
    hi: f64,
}

fn interval(vbar: Option<f64>, n: Option<usize>, lo: Option<f64>, hi: Option<f64>) -> Result<Interval> {
    let iv = Interval {
        vbar: positive("vbar", vbar.unwrap_or(1.0))?,
        n: at_least_one("n", n.unwrap_or(1))?,
        lo: lo.unwrap_or(0.0),
        hi: hi.unwrap_or(1.0),
    };
    if !(iv.lo < iv.hi) {
        return Err(config(format!("need lo < hi, got [{}, {}]", iv.lo, iv.hi)));
    }
    Ok(iv)
}

pub fn bound(a: BoundArgs) -> Result<Report> {
    let iv = interval(a.vbar, a.n, a.lo, a.hi)?;
    let b = v_inf_max_bound(iv.vbar, iv.n, iv.lo, iv.hi).map_err(config)?;
    let mut r = Report::new("bound", &iv, None, &["bound"]);
    r.row(vec![num(b)]);
    Ok(r)
}

#[derive(Serialize)]
struct TwoPoint {
    a: f64,
    mean: f64,
    #[serde(flatten)]
    interval: Interval,
}

pub fn two_point(a: TwoPointArgs) -> Result<Report> {
    let iv = interval(a.vbar, a.n, a.lo, a.hi)?;
    let t = match (a.a, a.mean) {
        (Some(_), Some(_)) => return Err(config("give either a or mean, not both")),
        (_, Some(mu)) => fixed_mean_optimum(mu, iv.lo, iv.hi, iv.n, iv.vbar),
        (p, None) => two_point_analysis(p.unwrap_or(0.5), iv.n, iv.vbar, iv.lo, iv.hi),
    }
    .map_err(config)?;
    let resolved = TwoPoint { a: t.a, mean: iv.lo + t.a * (iv.hi - iv.lo), interval: iv };
    let iv = &resolved.interval;

    let mut r = Report::new("two-point", &resolved, None, &["state", "stock", "probability", "h_star"]);
    r.summary("b", num(t.b));
    r.summary("gamma", num(t.gamma));
    r.summary("value", num(-t.gamma));
    r.summary("bound", num(v_inf_max_bound(iv.vbar, iv.n, iv.lo, iv.hi)?));
    let symmetric = (t.a - 0.5).abs() < 1e-12;
    for (i, p) in t.steady_state.iter().enumerate() {
        let s = i as f64 * iv.vbar;
        // the closed-form differential cost is for the symmetric law only
        let h = if symmetric { num(h_star_closed_form(s, iv.n, iv.vbar, iv.lo, iv.hi)?) } else { Value::Null };
        r.row(vec![i.into(), num(s), num(*p), h]);
    }
    Ok(r)
}

#[derive(Serialize)]
struct Solver {
    engine: Engine,
    tol: Option<f64>,
    max_iters: usize,
    damping: f64,
}

impl Solver {
    fn resolve(a: &SolverArgs) -> Result<Solver> {
        let s = Solver {
            engine: a.engine.unwrap_or(Engine::Rvi),
            tol: a.tol.map(|t| positive("tol", t)).transpose()?,
            max_iters: at_least_one("max_iters", a.max_iters.unwrap_or(1_000_000))?,
            damping: a.damping.unwrap_or(1.0),
        };
        if !(s.damping > 0.0 && s.damping <= 1.0) {
            return Err(config(format!("damping must lie in (0, 1], got {}", s.damping)));
        }
        if s.engine == Engine::PolicyIteration && (a.tol.is_some() || a.damping.is_some()) {
            return Err(config("tol and damping only apply to the rvi engine"));
        }
        Ok(s)
    }

    fn solve(&self, pmf: &PricePmf, n: usize, vbar: f64) -> Result<StationarySolution> {
        Ok(match self.engine {
            Engine::Rvi => {
                let opts = RviOptions { tol: self.tol, max_iters: self.max_iters, damping: self.damping };
                relative_value_iteration_with(pmf, n, vbar, opts)?
            }
            Engine::PolicyIteration => policy_iteration(pmf, n, vbar, self.max_iters)?,
        })
    }
}

#[derive(Serialize)]
struct Stationary {
    prices: Law,
    n: usize,
    vbar: f64,
    solver: Solver,
    chain_steps: usize,
}

fn default_law() -> Law {
    Law::lognormal(50.0, 20.0, 100, 0.0, 170.0)
}

pub fn stationary(a: StationaryArgs, seeds: &Seeds) -> Result<Report> {
    let resolved = Stationary {
        prices: a.prices.resolve(&default_law())?,
        n: at_least_one("n", a.n.unwrap_or(5))?,
        vbar: positive("vbar", a.vbar.unwrap_or(1.0))?,
        solver: Solver::resolve(&a.solver)?,
        chain_steps: a.chain_steps.unwrap_or(0),
    };
    let pmf = resolved.prices.pmf()?;
    let seed = (resolved.chain_steps > 0).then(|| seeds.take());

    let sol = resolved.solver.solve(&pmf, resolved.n, resolved.vbar)?;
    let chain = seed.map(|s| simulate_stationary(&sol, resolved.chain_steps, 0, s));
    let mut r = Report::new("stationary", &resolved, seed, &["state", "stock", "h", "occupation", "occupation_se"]);
    r.summary("gamma", num(sol.gamma));
    r.summary("value", num(-sol.gamma));
    r.summary("iterations", sol.iterations);
    r.summary("residual", num(sol.residual));
    r.summary("bellman_residual", num(sol.bellman_residual()));
    if let Some(c) = &chain {
        r.summary("simulated_profit", num(c.avg_profit.mean));
        r.summary("simulated_profit_se", num(c.avg_profit.std_error));
    }
    for (i, h) in sol.h.iter().enumerate() {
        let (occ, se) = match &chain {
            Some(c) => (num(c.occupation[i].mean), num(c.occupation[i].std_error)),
            None => (Value::Null, Value::Null),
        };
        r.row(vec![i.into(), num(i as f64 * sol.vbar), num(*h), occ, se]);
    }
    Ok(r)
}

#[derive(Serialize)]
struct Phase {
    prices: Law,
    n: usize,
    vbar: f64,
    solver: Solver,
}

pub fn phase(a: PhaseMapArgs) -> Result<Report> {
    let resolved = Phase {
        prices: a.prices.resolve(&Law::Uniform { mean: 50.0, std: 28.8, points: 101 })?,
        n: at_least_one("n", a.n.unwrap_or(10))?,
        vbar: positive("vbar", a.vbar.unwrap_or(1.0))?,
        solver: Solver::resolve(&a.solver)?,
    };
    let pmf = resolved.prices.pmf()?;

    let sol = resolved.solver.solve(&pmf, resolved.n, resolved.vbar)?;
    let map = phase_map(&sol);
    let mut r = Report::new("phase-map", &resolved, None, &["state", "action", "price"]);
    r.summary("gamma", num(sol.gamma));
    r.summary("trading_states", map.len());
    r.summary("gap_states", map.iter().filter(|b| b.do_nothing_gap).map(|b| b.state).collect::<Vec<_>>());
    for b in &map {
        if let Some(p) = b.buy_max {
            r.row(vec![b.state.into(), num(sol.vbar), num(p)]);
        }
        if let Some(p) = b.sell_min {
            r.row(vec![b.state.into(), num(-sol.vbar), num(p)]);
        }
    }
    Ok(r)
}
