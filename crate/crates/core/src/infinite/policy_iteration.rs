use nalgebra::{DMatrix, DVector};

use super::StationarySolution;
use crate::price::PricePmf;
use crate::{Error, Result};

/// Howard policy iteration on the same grid model as relative value
/// iteration; used as an independent check. Each evaluation solves the
/// `(n+1)`-dimensional linear system for `(γ, h(1..n))` with `h(0) = 0`.
pub fn policy_iteration(pmf: &PricePmf, n: usize, vbar: f64, max_iters: usize) -> Result<StationarySolution> {
    if n == 0 || !(vbar > 0.0) {
        return Err(Error::InvalidConfig("need n >= 1 and vbar > 0".into()));
    }
    let support = pmf.support();
    let probs = pmf.probs();
    // Start from "buy at the lowest price, sell at the highest", under which
    // every state communicates, and only switch an action on a strict
    // improvement so the chain stays unichain.
    let last = support.len() - 1;
    let mut policy: Vec<Vec<i8>> = (0..=n)
        .map(|i| {
            (0..support.len())
                .map(|j| {
                    if j == 0 && i < n && last > 0 {
                        1
                    } else if j == last && i > 0 && last > 0 {
                        -1
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    let eps = 1e-10 * pmf.max().max(1.0) * vbar;
    for iter in 1..=max_iters {
        // unknowns x = (γ, h1, .., hn); row i: h(i) + γ − Σ p (h(i+a)) = Σ p λ a v̄
        let mut m = DMatrix::<f64>::zeros(n + 1, n + 1);
        let mut rhs = DVector::<f64>::zeros(n + 1);
        for i in 0..=n {
            m[(i, 0)] += 1.0;
            if i > 0 {
                m[(i, i)] += 1.0;
            }
            for j in 0..support.len() {
                let a = policy[i][j];
                let next = (i as i64 + a as i64) as usize;
                if next > 0 {
                    m[(i, next)] -= probs[j];
                }
                rhs[i] += probs[j] * support[j] * a as f64 * vbar;
            }
        }
        let x = m.lu().solve(&rhs).ok_or_else(|| Error::InvalidConfig("singular policy evaluation".into()))?;
        let gamma = x[0];
        let mut h = vec![0.0; n + 1];
        h[1..].copy_from_slice(&x.as_slice()[1..]);

        let mut changed = false;
        for i in 0..=n {
            for j in 0..support.len() {
                let cost = |a: i8| {
                    let next = i as i64 + a as i64;
                    if next < 0 || next > n as i64 {
                        f64::INFINITY
                    } else {
                        support[j] * a as f64 * vbar + h[next as usize]
                    }
                };
                let current = cost(policy[i][j]);
                let (best_a, best) = [0i8, -1, 1]
                    .into_iter()
                    .map(|a| (a, cost(a)))
                    .fold((policy[i][j], current), |acc, c| if c.1 < acc.1 { c } else { acc });
                if best < current - eps {
                    policy[i][j] = best_a;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(StationarySolution::from_parts(pmf.clone(), n, vbar, gamma, h, iter));
        }
    }
    Err(Error::NotConverged { iterations: max_iters, residual: f64::NAN })
}
