//! Finite-horizon optimal threshold policy and value of storage.

mod config;
mod table;

pub use config::{Penalties, ProblemConfig, StagePrices};
pub use table::{compute_thresholds, storage_value, storage_value_from, ThresholdTable};

/// Relative distance below which a state is treated as lying on the v̄-grid.
pub(crate) const GRID_SNAP: f64 = 1e-9;

/// Snap `s` to the nearest multiple of `vbar` when it is within rounding
/// distance of one.
pub fn snap_to_grid(s: f64, vbar: f64) -> f64 {
    let x = s / vbar;
    let r = x.round();
    if (x - r).abs() <= GRID_SNAP {
        r * vbar
    } else {
        s
    }
}

/// Segment `i` with `s ∈ [i·v̄, (i+1)·v̄)`, after grid snapping.
pub fn segment_index(s: f64, vbar: f64) -> usize {
    let x = s / vbar;
    let r = x.round();
    let x = if (x - r).abs() <= GRID_SNAP { r } else { x.floor() };
    x.max(0.0) as usize
}
