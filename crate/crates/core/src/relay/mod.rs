//! Fading-channel link outages and minimum relay placement.

pub mod channel;
pub mod graph;
pub mod planner;

pub use channel::{link_outage, outage_probability, ChannelParams, Interferer};
pub use graph::{build_weighted_graph, edge_weight, Edge, LinkLimits, Node, NodeKind, WeightedGraph};
pub use planner::{
    evaluate_tree, min_tree_cost, place_relays, place_relays_exact, place_relays_greedy, relay_lower_bound,
    spanning_tree, PlannerMode, RelaySolution, SensorDelivery,
};
