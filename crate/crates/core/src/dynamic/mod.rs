//! Maintaining the geodesic to a fixed tree `T` while the other endpoint
//! moves along a straight segment inside one orthant.
//!
//! The support sequence stays valid between finitely many events. A ratio
//! event merges two adjacent pairs whose ratios meet; an extension event
//! splits a pair whose flow can no longer saturate. [`sweep`] finds them in
//! order.

mod p2;
mod parametric;
mod rescale;
mod segment;
mod sweep;

pub use p2::{merge_pairs, next_p2_event, p2_coefficients, DiscardedRoot, P2Event};
pub use parametric::{Assignment, Balance, P3Outcome, ParametricFlow};
pub use rescale::{rescale_lambda, scaled_drift, RescaleMap, ScaledWeights};
pub use segment::Segment;
pub use sweep::{
    split_pair, sweep, EventJson, EventKind, IntervalJson, SampleJson, SupportInterval, SweepConfig,
    SweepEvent, SweepJson, SweepResult, TOLERANCE_ENV,
};
