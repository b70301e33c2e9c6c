//! Reference implementations used only by the tests. Nothing here calls the
//! threshold recursion; the oracles work directly on the dynamic program.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ramp_storage::finite::{Penalties, ProblemConfig, StagePrices};
use ramp_storage::price::PricePmf;

/// Backward dynamic program on the integer grid `j = 0..=n+N` (state
/// `j·v̄`), actions `{−1, 0, +1}` in units of `v̄`. Returns `V[k][j]`.
///
/// Grid actions are exact for grid starts: every value function is
/// piecewise linear and convex with kinks on the grid, so the minimum over
/// `[−v̄, v̄]` sits at a grid neighbour.
pub fn backward_dp(cfg: &ProblemConfig) -> Vec<Vec<f64>> {
    let big_n = cfg.n_stages;
    let top = cfg.n + big_n;
    let vbar = cfg.vbar;
    let slopes = cfg.penalties.slopes();
    let terminal_slope = |i: usize| slopes[big_n][i.min(slopes[big_n].len() - 1)];
    let mut v = vec![vec![0.0; top + 1]; big_n + 1];
    for j in 0..=top {
        let below = j.min(cfg.n) as f64 * vbar;
        let above: f64 = (cfg.n..j).map(|i| terminal_slope(i) * vbar).sum();
        v[big_n][j] = -cfg.salvage * below + above;
    }
    for k in (0..big_n).rev() {
        let pmf = cfg.pmf(k);
        for j in 0..=top {
            let s = j as f64 * vbar;
            let mut expect = 0.0;
            for (&price, &p) in pmf.support().iter().zip(pmf.probs()) {
                let mut best = v[k + 1][j];
                if j > 0 {
                    best = best.min(-price * vbar + v[k + 1][j - 1]);
                }
                if j < top {
                    best = best.min(price * vbar + v[k + 1][j + 1]);
                }
                expect += p * best;
            }
            v[k][j] = cfg.penalties.eval(k, s, vbar) + expect;
        }
    }
    v
}

/// Best profit over every action sequence in `{−v̄, 0, +v̄}^N` for a known
/// price path, from grid state `s0`, staying within `[0, n v̄]`.
pub fn enumerate_best(cfg: &ProblemConfig, prices: &[f64], s0: usize) -> f64 {
    fn go(cfg: &ProblemConfig, prices: &[f64], k: usize, j: usize) -> f64 {
        if k == prices.len() {
            return cfg.salvage * j as f64 * cfg.vbar;
        }
        let mut best = f64::NEG_INFINITY;
        for a in [-1i64, 0, 1] {
            let next = j as i64 + a;
            if next < 0 || next > cfg.n as i64 {
                continue;
            }
            let pen = cfg.penalties.eval(k, j as f64 * cfg.vbar, cfg.vbar);
            let r = -pen - prices[k] * a as f64 * cfg.vbar + go(cfg, prices, k + 1, next as usize);
            best = best.max(r);
        }
        best
    }
    go(cfg, prices, 0, s0)
}

fn random_pmf(rng: &mut ChaCha8Rng) -> PricePmf {
    let atoms = rng.random_range(1..=5);
    let mut support: Vec<f64> = Vec::with_capacity(atoms);
    let mut x = rng.random_range(0.0..20.0);
    for _ in 0..atoms {
        support.push(x);
        x += rng.random_range(0.5..30.0);
    }
    let weights = (0..atoms).map(|_| rng.random_range(0.05..1.0)).collect();
    PricePmf::new(support, weights).unwrap()
}

/// Random problem: at most 5 atoms per law, `n ≤ 4`, `N ≤ 6`, optional
/// per-stage laws, random salvage and random convex penalties.
pub fn random_config(seed: u64) -> ProblemConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let big_n = rng.random_range(1..=6);
    let n = rng.random_range(1..=4);
    let vbar = [0.5, 1.0, 2.5][rng.random_range(0..3)];
    let prices = if rng.random_bool(0.5) {
        StagePrices::Iid(random_pmf(&mut rng))
    } else {
        StagePrices::PerStage((0..big_n).map(|_| random_pmf(&mut rng)).collect())
    };
    let last = prices.at(big_n - 1).clone();
    let salvage = last.min() + rng.random::<f64>() * (last.max() - last.min());
    let penalties = if rng.random_bool(0.5) {
        Penalties::capacity_barrier(&prices, big_n, n, vbar)
    } else {
        let slopes = (0..=big_n)
            .map(|k| {
                let lmax = prices.at(k.min(big_n - 1)).max();
                let mut h = 0.0;
                let mut row = Vec::with_capacity(n + 1);
                for _ in 0..n {
                    h += if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..3.0) };
                    row.push(h);
                }
                row.push((lmax + 1.0).max(h) + rng.random_range(0.0..5.0));
                row
            })
            .collect();
        Penalties::from_slopes(slopes, vbar)
    };
    let cfg = ProblemConfig { n_stages: big_n, vbar, n, salvage, penalties, prices };
    cfg.validate().expect("generated config must be valid");
    cfg
}

/// Symmetric-relative comparison.
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}
