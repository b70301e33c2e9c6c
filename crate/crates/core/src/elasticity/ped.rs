use serde::Serialize;

use super::ResponseCurve;
use crate::infinite::StationarySolution;
use crate::{Error, Result};

/// Point elasticity of total demand `d^f + v` at one price.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PedEstimate {
    pub price: f64,
    pub d_firm: f64,
    pub ped: f64,
}

/// Elasticities along a response curve plus the bins that had to be skipped.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PedCurve {
    pub points: Vec<PedEstimate>,
    /// Prices of non-empty bins where `d^f + v ≤ 0`.
    pub skipped: Vec<f64>,
}

/// Finite-difference elasticity across the non-empty bins: central in the
/// interior, one-sided at the two ends.
pub fn ped_curve(curve: &ResponseCurve, d_firm: f64) -> Result<PedCurve> {
    if !(d_firm > 0.0) {
        return Err(Error::InvalidConfig(format!("firm demand must be positive, got {d_firm}")));
    }
    let pts: Vec<(f64, f64)> =
        curve.price_bins.iter().zip(&curve.avg_response).filter_map(|(&p, r)| r.map(|r| (p, r))).collect();
    let mut points = Vec::with_capacity(pts.len());
    let mut skipped = Vec::new();
    for j in 0..pts.len() {
        let (price, v) = pts[j];
        let demand = d_firm + v;
        if demand <= 0.0 {
            skipped.push(price);
            continue;
        }
        let (a, b) = (j.saturating_sub(1), (j + 1).min(pts.len() - 1));
        let ped = if a == b || price == 0.0 {
            0.0
        } else {
            ((pts[b].1 - pts[a].1) / demand) / ((pts[b].0 - pts[a].0) / price)
        };
        points.push(PedEstimate { price, d_firm, ped });
    }
    Ok(PedCurve { points, skipped })
}

/// Elasticity at an arbitrary price, linear between neighbouring points and
/// flat beyond the ends.
pub fn ped_at(curve: &PedCurve, price: f64) -> Option<f64> {
    let pts = &curve.points;
    let first = pts.first()?;
    if price <= first.price {
        return Some(first.ped);
    }
    for w in pts.windows(2) {
        if price <= w[1].price {
            let t = (price - w[0].price) / (w[1].price - w[0].price);
            return Some(w[0].ped + t * (w[1].ped - w[0].ped));
        }
    }
    pts.last().map(|p| p.ped)
}

/// Average response at an arbitrary price, linear between non-empty bins and
/// flat beyond the ends.
pub fn response_at(curve: &ResponseCurve, price: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        curve.price_bins.iter().zip(&curve.avg_response).filter_map(|(&p, r)| r.map(|r| (p, r))).collect();
    let first = pts.first()?;
    if price <= first.0 {
        return Some(first.1);
    }
    for w in pts.windows(2) {
        if price <= w[1].0 {
            let t = (price - w[0].0) / (w[1].0 - w[0].0);
            return Some(w[0].1 + t * (w[1].1 - w[0].1));
        }
    }
    pts.last().map(|p| p.1)
}

/// Midpoint (arc) elasticity of `d^f + v_avg` between prices `lo` and `hi`:
/// `(Δd / d̄) / (Δλ / λ̄)` with `d̄` and `λ̄` the averages at the two ends.
pub fn arc_ped(curve: &ResponseCurve, d_firm: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(d_firm > 0.0) {
        return Err(Error::InvalidConfig(format!("firm demand must be positive, got {d_firm}")));
    }
    if !(lo < hi) {
        return Err(Error::InvalidConfig(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    let (va, vb) = match (response_at(curve, lo), response_at(curve, hi)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::NoData),
    };
    let d_mid = d_firm + (va + vb) / 2.0;
    if d_mid <= 0.0 {
        return Err(Error::InvalidConfig(format!("average demand {d_mid} is not positive")));
    }
    Ok(((vb - va) / d_mid) / ((hi - lo) / ((hi + lo) / 2.0)))
}

/// Elasticity of `d^f + v*(s, λ)` at grid state `state` and support price
/// `price` of the stationary policy. The difference is taken towards the
/// neighbouring support price where the action changes (forward first); it
/// is zero when the action is the same on both sides.
pub fn state_conditional_ped(sol: &StationarySolution, d_firm: f64, state: usize, price: f64) -> Result<PedEstimate> {
    if !(d_firm > 0.0) {
        return Err(Error::InvalidConfig(format!("firm demand must be positive, got {d_firm}")));
    }
    if state > sol.n {
        return Err(Error::StateOutOfRange { state: state as f64 * sol.vbar, capacity: sol.capacity() });
    }
    let j = sol.pmf.index_of(price).ok_or(Error::PriceNotInSupport(price))?;
    let support = sol.pmf.support();
    let v = sol.grid_action(state, j);
    let demand = d_firm + v;
    if demand <= 0.0 {
        return Err(Error::InvalidConfig(format!("total demand {demand} is not positive at price {price}")));
    }
    let step = |k: usize, from: usize| -> f64 {
        let dd = sol.grid_action(state, k) - sol.grid_action(state, from);
        let dl = support[k.max(from)] - support[k.min(from)];
        let dd = if k > from { dd } else { -dd };
        dd * price / (demand * dl)
    };
    let ped = if j + 1 < support.len() && sol.policy[state][j + 1] != sol.policy[state][j] {
        step(j + 1, j)
    } else if j > 0 && sol.policy[state][j - 1] != sol.policy[state][j] {
        step(j - 1, j)
    } else {
        0.0
    };
    Ok(PedEstimate { price, d_firm, ped })
}

/// CSV with columns `price,avg_response,count,ped`. Empty bins and skipped
/// bins leave the missing fields blank.
pub fn write_elasticity_csv<W: std::io::Write>(curve: &ResponseCurve, ped: &PedCurve, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["price", "avg_response", "count", "ped"])?;
    for ((&price, resp), &count) in curve.price_bins.iter().zip(&curve.avg_response).zip(&curve.sample_counts) {
        let e = resp.and_then(|_| ped.points.iter().find(|p| p.price == price)).map(|p| p.ped.to_string());
        wtr.write_record([
            price.to_string(),
            resp.map(|r| r.to_string()).unwrap_or_default(),
            count.to_string(),
            e.unwrap_or_default(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
