use serde::Serialize;

use super::StationarySolution;
use crate::Result;

/// Where the stationary policy switches from buying to selling at one grid
/// state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseBoundary {
    pub state: usize,
    /// Largest support price at which the policy buys `v̄`.
    pub buy_max: Option<f64>,
    /// Smallest support price at which the policy sells `v̄`.
    pub sell_min: Option<f64>,
    /// Some support price between the two is a do-nothing price.
    pub do_nothing_gap: bool,
}

/// Per-state buy/sell boundaries. States where the policy never trades are
/// omitted, so a single-price law gives an empty map.
pub fn phase_map(sol: &StationarySolution) -> Vec<PhaseBoundary> {
    let support = sol.pmf.support();
    let mut out = Vec::new();
    for (state, row) in sol.policy.iter().enumerate() {
        let buy_idx = row.iter().rposition(|&a| a > 0);
        let sell_idx = row.iter().position(|&a| a < 0);
        if buy_idx.is_none() && sell_idx.is_none() {
            continue;
        }
        let from = buy_idx.map_or(0, |b| b + 1);
        let to = sell_idx.unwrap_or(row.len());
        let do_nothing_gap = row[from.min(to)..to].iter().any(|&a| a == 0);
        out.push(PhaseBoundary {
            state,
            buy_max: buy_idx.map(|j| support[j]),
            sell_min: sell_idx.map(|j| support[j]),
            do_nothing_gap,
        });
    }
    out
}

/// CSV with columns `state,action,price`: one row per boundary point, the
/// action in MWh (`+v̄` for the buy edge, `−v̄` for the sell edge).
pub fn write_phase_csv<W: std::io::Write>(map: &[PhaseBoundary], vbar: f64, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["state", "action", "price"])?;
    for b in map {
        if let Some(p) = b.buy_max {
            wtr.write_record([b.state.to_string(), vbar.to_string(), p.to_string()])?;
        }
        if let Some(p) = b.sell_min {
            wtr.write_record([b.state.to_string(), (-vbar).to_string(), p.to_string()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infinite::{relative_value_iteration_with, RviOptions};
    use crate::price::{pmf_lognormal, pmf_two_point, pmf_uniform, PricePmf};

    #[test]
    fn two_point_edges() {
        let pmf = pmf_two_point(0.0, 1.0, 0.5).unwrap();
        for n in [1, 3, 6] {
            let sol = relative_value_iteration_with(&pmf, n, 1.0, RviOptions::default()).unwrap();
            let map = phase_map(&sol);
            assert_eq!(map.len(), n + 1);
            assert_eq!((map[0].buy_max, map[0].sell_min), (Some(0.0), None));
            assert_eq!((map[n].buy_max, map[n].sell_min), (None, Some(1.0)));
            assert_eq!(sol.policy[0], vec![1, 0]);
            assert_eq!(sol.policy[n], vec![0, -1]);
            for b in &map[1..n] {
                assert_eq!((b.buy_max, b.sell_min, b.do_nothing_gap), (Some(0.0), Some(1.0), false));
            }
        }
    }

    #[test]
    fn degenerate_is_empty() {
        let sol = relative_value_iteration_with(&PricePmf::degenerate(3.0).unwrap(), 3, 1.0, RviOptions::default())
            .unwrap();
        assert!(phase_map(&sol).is_empty());
    }

    fn mid_boundary(map: &[PhaseBoundary], state: usize) -> f64 {
        let b = map.iter().find(|b| b.state == state).unwrap();
        (b.buy_max.unwrap() + b.sell_min.unwrap()) / 2.0
    }

    #[test]
    fn boundaries_fall_with_state_and_uniform_switches_at_mean() {
        let uni = pmf_uniform(50.0, 28.8, 101).unwrap();
        let sol = relative_value_iteration_with(&uni, 10, 1.0, RviOptions::default()).unwrap();
        let map = phase_map(&sol);
        for w in map.windows(2) {
            if let (Some(a), Some(b)) = (w[0].buy_max, w[1].buy_max) {
                assert!(b <= a);
            }
            if let (Some(a), Some(b)) = (w[0].sell_min, w[1].sell_min) {
                assert!(b <= a);
            }
        }
        let half = mid_boundary(&map, 5);
        assert!((half - 50.0).abs() <= 1.0, "half-full switch at {half}");

        let logn = pmf_lognormal(50.0, 28.8, 101, (uni.min(), uni.max())).unwrap();
        let lsol = relative_value_iteration_with(&logn, 10, 1.0, RviOptions::default()).unwrap();
        let lmap = phase_map(&lsol);
        let shifted = (1..10).filter(|&i| mid_boundary(&lmap, i) < mid_boundary(&map, i)).count();
        assert!(shifted >= 5, "log-normal boundary left of uniform at only {shifted} states");
    }

    #[test]
    fn csv_columns() {
        let pmf = pmf_two_point(0.0, 1.0, 0.5).unwrap();
        let sol = relative_value_iteration_with(&pmf, 1, 1.0, RviOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_phase_csv(&phase_map(&sol), 1.0, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "state,action,price\n0,1,0\n1,-1,1\n");
    }
}
