//! Searching the space of cross-group orderings.
//!
//! [`xorder_dp`] is the main solver. [`greedy_forward`] and
//! [`insertion_baseline`] are cheaper heuristics for the disparity-only
//! problem, and [`brute_force_optimal`] enumerates every interleaving of
//! small instances.

mod brute;
mod dp;
mod greedy;
mod insertion;
mod objective;
mod sweep;

pub use brute::{brute_force_optimal, BRUTE_FORCE_BUDGET};
pub use dp::{replay, xorder_dp, Back, DpCell, XOrder, DEFAULT_CELL_BUDGET};
pub use greedy::greedy_forward;
pub use insertion::insertion_baseline;
pub use objective::{DisparityMetric, Objective, ObjectiveConfig};
pub use sweep::{auto_sweep, sweep_lambda, AutoGrid, CurvePoint, LambdaSetting, TradeoffCurve};
