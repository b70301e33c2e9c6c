//! Long-run (average-cost) operation.
//!
//! Closed forms for two-point price laws live in [`closed_form`]; arbitrary
//! discrete laws go through [`relative_value_iteration`], which returns a
//! [`StationarySolution`] holding the differential cost on the storage grid
//! and the greedy stationary policy.

mod chain;
mod closed_form;
mod phase;
mod policy_iteration;
mod rvi;

pub use chain::{simulate_stationary, ChainStats};
pub use closed_form::{fixed_mean_optimum, h_star_closed_form, two_point_analysis, v_inf_max_bound, TwoPointAnalysis};
pub use phase::{phase_map, write_phase_csv, PhaseBoundary};
pub use policy_iteration::policy_iteration;
pub use rvi::{relative_value_iteration, relative_value_iteration_with, RviOptions, StationarySolution};
