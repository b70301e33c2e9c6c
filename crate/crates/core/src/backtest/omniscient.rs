use crate::finite::{snap_to_grid, ProblemConfig};
use crate::{Error, Result};

/// Best achievable profit with the whole price sequence known in advance.
///
/// Deterministic backward DP over the v̄-grid `{0, v̄, …, n·v̄}` together with
/// the coset `s0 + j·v̄` when `s0` is off the grid. Transitions may move to
/// any state within one ramp step; the optimum of the piecewise-linear
/// problem lies on this set.
pub fn omniscient_value(cfg: &ProblemConfig, prices: &[f64], s0: f64) -> Result<f64> {
    cfg.validate()?;
    if prices.len() != cfg.n_stages {
        return Err(Error::LengthMismatch { expected: cfg.n_stages, got: prices.len() });
    }
    let cap = cfg.capacity();
    let vbar = cfg.vbar;
    if !(s0 >= 0.0 && s0 <= cap) {
        return Err(Error::StateOutOfRange { state: s0, capacity: cap });
    }
    let s0 = snap_to_grid(s0, vbar);
    let mut states: Vec<f64> = (0..=cfg.n).map(|j| j as f64 * vbar).collect();
    let offset = s0 - (s0 / vbar).floor() * vbar;
    if offset != 0.0 {
        states.extend((0..cfg.n).map(|j| offset + j as f64 * vbar).filter(|s| *s <= cap));
    }
    states.sort_by(|a, b| a.total_cmp(b));
    states.dedup();
    let start = states
        .iter()
        .position(|s| (s - s0).abs() <= 1e-12 * (1.0 + cap))
        .expect("initial state is in the state set");

    let reach = vbar * (1.0 + 1e-12);
    let mut value: Vec<f64> = states.iter().map(|s| cfg.salvage * s).collect();
    for k in (0..cfg.n_stages).rev() {
        let price = prices[k];
        value = states
            .iter()
            .map(|&s| {
                let hold = -cfg.penalties.eval(k, s, vbar);
                states
                    .iter()
                    .zip(&value)
                    .filter(|(next, _)| (**next - s).abs() <= reach)
                    .map(|(next, w)| hold - price * (next - s) + w)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
    }
    Ok(value[start])
}
