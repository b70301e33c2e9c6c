use serde::Serialize;

use super::MarketConfig;
use crate::infinite::StationarySolution;
use crate::{Error, Result};

/// Outcome of one clearing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Clearing {
    pub price: f64,
    /// Storage purchase the ISO schedules (negative sells).
    pub storage: f64,
    /// No price in `[0, price_cap]` balances the forecast; the price is
    /// pinned at the bound and the difference goes to reserves.
    pub rationed: bool,
}

const PRICE_TOL: f64 = 1e-9;

/// Price intervals on which the storage response is constant, in
/// increasing price order, as `(upper breakpoint, action)`; the last piece
/// is unbounded above. Actions strictly decrease from piece to piece.
fn response_pieces(sol: &StationarySolution, s: f64) -> Vec<(f64, f64)> {
    let cap = sol.capacity();
    let s = s.clamp(0.0, cap);
    let lo = -sol.vbar.min(s);
    let hi = sol.vbar.min(cap - s);
    let mut vs = vec![lo];
    let first = ((s + lo) / sol.vbar).floor() as i64 + 1;
    let last = ((s + hi) / sol.vbar).ceil() as i64 - 1;
    for g in first..=last {
        let v = g as f64 * sol.vbar - s;
        if v > lo + 1e-12 && v < hi - 1e-12 {
            vs.push(v);
        }
    }
    if hi > lo {
        vs.push(hi);
    }
    // price at which the store is indifferent between consecutive points;
    // non-increasing in the point index by convexity of H
    let mut breaks = Vec::with_capacity(vs.len().saturating_sub(1));
    for w in vs.windows(2) {
        let b = -(sol.h_at(s + w[1]) - sol.h_at(s + w[0])) / (w[1] - w[0]);
        breaks.push(breaks.last().map_or(b, |&prev: &f64| b.min(prev)));
    }
    // highest action at the lowest prices
    let mut pieces = Vec::with_capacity(vs.len());
    for m in (0..vs.len()).rev() {
        let upper = if m == 0 { f64::INFINITY } else { breaks[m - 1] };
        pieces.push((upper, vs[m]));
    }
    pieces
}

/// Solve `aλ + ŵ = d(λ) + v*(s_est, λ)` for the clearing price.
///
/// The left side minus the right is increasing in `λ` with upward jumps
/// where the storage switches to a smaller action. A root inside a piece is
/// found by bisection; when the jump at a breakpoint straddles zero the
/// store is indifferent there and is scheduled for exactly the balancing
/// quantity.
pub fn clear_price(mcfg: &MarketConfig, w_hat: f64, sol: Option<&StationarySolution>, s_est: f64) -> Result<Clearing> {
    if !(mcfg.supply_slope > 0.0) {
        return Err(Error::InvalidConfig("supply_slope must be positive".into()));
    }
    let a = mcfg.supply_slope;
    let excess = |price: f64, v: f64| a * price + w_hat - mcfg.demand.at(price) - v;
    let pieces = match sol {
        Some(sol) => response_pieces(sol, s_est),
        None => vec![(f64::INFINITY, 0.0)],
    };
    let cap = mcfg.price_cap;

    let mut lower = 0.0;
    let mut prev: Option<f64> = None;
    for &(upper, v) in &pieces {
        if upper <= lower {
            continue;
        }
        let u = upper.min(cap);
        let (fl, fu) = (excess(lower, v), excess(u, v));
        if fl > 0.0 {
            return Ok(match prev {
                // jump across zero at the breakpoint
                Some(_) => Clearing { price: lower, storage: a * lower + w_hat - mcfg.demand.at(lower), rationed: false },
                None => Clearing { price: lower, storage: v, rationed: true },
            });
        }
        if fu >= 0.0 {
            let (mut x0, mut x1) = (lower, u);
            while x1 - x0 > PRICE_TOL {
                let mid = 0.5 * (x0 + x1);
                if excess(mid, v) < 0.0 {
                    x0 = mid;
                } else {
                    x1 = mid;
                }
            }
            return Ok(Clearing { price: 0.5 * (x0 + x1), storage: v, rationed: false });
        }
        if u >= cap {
            return Ok(Clearing { price: cap, storage: v, rationed: true });
        }
        prev = Some(v);
        lower = u;
    }
    unreachable!("the last response piece is unbounded above")
}
