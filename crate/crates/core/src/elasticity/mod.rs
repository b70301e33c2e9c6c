//! Price responsiveness of an optimally operated store.
//!
//! [`average_response`] averages the finite-horizon optimal action over
//! stages, states and price paths, clustered by price. [`ped_curve`] turns
//! that curve into point elasticities of total demand `d^f + v`;
//! [`state_conditional_ped`] does the same for one grid state of the
//! stationary policy.

mod ped;
mod response;

pub use ped::{arc_ped, ped_at, ped_curve, response_at, state_conditional_ped, write_elasticity_csv, PedCurve, PedEstimate};
pub use response::{average_response, average_response_with, isotonic_residual, ResponseCurve, ResponseOptions};
