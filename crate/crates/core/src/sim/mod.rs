//! Occupant activity traces replayed against timeout-driven supply control.

pub mod detect;
pub mod metrics;
pub mod trace;

pub use detect::{detect, detect_with, Detection, SensingField};
pub use metrics::{
    frontier_from_log, occupancy_ticks, simulate, ta_cdf, wastage_at_comfort, wastage_comfort_frontier, FrontierPoint,
    ReplayLog, SimMetrics, TimeoutPolicy,
};
pub use trace::{generate_trace, ActivityEvent, ActivityTrace, EventKind, OccupantModel};
