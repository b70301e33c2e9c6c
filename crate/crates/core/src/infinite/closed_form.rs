use serde::Serialize;

use crate::{Error, Result};

/// Two-point price law `P(λ_hi) = a`, `P(λ_lo) = 1 − a`, and the long-run
/// behaviour of the buy-low/sell-high policy under it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoPointAnalysis {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub vbar: f64,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    /// Average cost per stage (negative when storage earns money).
    pub gamma: f64,
    /// Stationary probability of holding `i·v̄`, for `i = 0..=n`.
    pub steady_state: Vec<f64>,
}

fn check_support(vbar: f64, n: usize, lo: f64, hi: f64) -> Result<()> {
    if !(vbar > 0.0 && vbar.is_finite()) {
        return Err(Error::InvalidConfig(format!("vbar must be positive, got {vbar}")));
    }
    if n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidConfig(format!("need lambda_lo < lambda_hi, got [{lo}, {hi}]")));
    }
    Ok(())
}

/// Largest long-run profit per stage over all price laws on `[lo, hi]`:
/// `v̄ (hi − lo)/2 · n/(n+1)`.
pub fn v_inf_max_bound(vbar: f64, n: usize, lo: f64, hi: f64) -> Result<f64> {
    check_support(vbar, n, lo, hi)?;
    Ok(vbar * (hi - lo) / 2.0 * n as f64 / (n as f64 + 1.0))
}

/// `1 + b + ... + b^k`
fn geometric_sum(b: f64, k: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for _ in 0..k {
        term *= b;
        sum += term;
    }
    sum
}

pub fn two_point_analysis(a: f64, n: usize, vbar: f64, lo: f64, hi: f64) -> Result<TwoPointAnalysis> {
    check_support(vbar, n, lo, hi)?;
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidConfig(format!("a must lie in (0, 1), got {a}")));
    }
    let b = (1.0 - a) / a;
    let full = geometric_sum(b, n);
    let gamma = -vbar * (hi - lo) * b * geometric_sum(b, n - 1) / ((b + 1.0) * full);
    let mut steady_state = Vec::with_capacity(n + 1);
    let mut p = 1.0 / full;
    for _ in 0..=n {
        steady_state.push(p);
        p *= b;
    }
    Ok(TwoPointAnalysis { a, b, n, vbar, lambda_lo: lo, lambda_hi: hi, gamma, steady_state })
}

/// The best two-point law on `[lo, hi]` with mean `mu`.
pub fn fixed_mean_optimum(mu: f64, lo: f64, hi: f64, n: usize, vbar: f64) -> Result<TwoPointAnalysis> {
    check_support(vbar, n, lo, hi)?;
    if !(mu > lo && mu < hi) {
        return Err(Error::InvalidConfig(format!("mean {mu} must lie strictly inside ({lo}, {hi})")));
    }
    two_point_analysis((mu - lo) / (hi - lo), n, vbar, lo, hi)
}

/// Differential cost of the symmetric two-point optimum, normalized to zero
/// at an empty store. At full capacity the last segment (`i = n − 1`) is used.
pub fn h_star_closed_form(s: f64, n: usize, vbar: f64, lo: f64, hi: f64) -> Result<f64> {
    check_support(vbar, n, lo, hi)?;
    let cap = n as f64 * vbar;
    if !(0.0..=cap).contains(&s) {
        return Err(Error::StateOutOfRange { state: s, capacity: cap });
    }
    let i = ((s / vbar).floor() as usize).min(n - 1) as f64;
    let nf = n as f64;
    let slope = ((i + 1.0) * lo + (nf - i) * hi) / (nf + 1.0);
    Ok(-slope * s - i * (i + 1.0) * (hi - lo) * vbar / (2.0 * (nf + 1.0)))
}
