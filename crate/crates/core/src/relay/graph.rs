use serde::{Deserialize, Serialize};

use super::channel::{distance, link_outage, ChannelParams};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Sensor,
    Candidate,
    Sink,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub kind: NodeKind,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub distance_m: f64,
    pub outage: f64,
    /// -ln(1 - outage): additive along paths.
    pub weight: f64,
}

/// Link limits applied while building the graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkLimits {
    pub max_link_distance_m: f64,
    pub outage_cap: f64,
}

impl Default for LinkLimits {
    fn default() -> Self {
        LinkLimits { max_link_distance_m: 30.0, outage_cap: 0.1 }
    }
}

/// Nodes are ordered sensors, then candidates, then the sink.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub n_sensors: usize,
    pub n_candidates: usize,
}

impl WeightedGraph {
    pub fn sink(&self) -> usize {
        self.n_sensors + self.n_candidates
    }

    pub fn candidate_node(&self, c: usize) -> usize {
        self.n_sensors + c
    }

    pub fn sensors(&self) -> std::ops::Range<usize> {
        0..self.n_sensors
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<&Edge> {
        let (a, b) = (a.min(b), a.max(b));
        self.edges.iter().find(|e| e.a == a && e.b == b)
    }
}

pub fn edge_weight(outage: f64) -> f64 {
    -(-outage).ln_1p()
}

/// Outage-weighted graph over every node pair within range and under the cap.
pub fn build_weighted_graph(
    sensors: &[(f64, f64)],
    candidates: &[(f64, f64)],
    sink: (f64, f64),
    channel: &ChannelParams,
    limits: &LinkLimits,
) -> Result<WeightedGraph> {
    channel.validate()?;
    if sensors.is_empty() {
        return invalid("at least one sensor is required");
    }
    if !(limits.max_link_distance_m > 0.0 && (0.0..1.0).contains(&limits.outage_cap)) {
        return invalid("link limits need a positive distance and an outage cap in [0, 1)");
    }
    let mut nodes: Vec<Node> = Vec::with_capacity(sensors.len() + candidates.len() + 1);
    nodes.extend(sensors.iter().map(|&(x, y)| Node { kind: NodeKind::Sensor, x, y }));
    nodes.extend(candidates.iter().map(|&(x, y)| Node { kind: NodeKind::Candidate, x, y }));
    nodes.push(Node { kind: NodeKind::Sink, x: sink.0, y: sink.1 });
    for (i, n) in nodes.iter().enumerate() {
        if !(n.x.is_finite() && n.y.is_finite()) {
            return invalid(format!("node {i} has a non-finite position"));
        }
        if let Some(j) = nodes[..i].iter().position(|m| m.x == n.x && m.y == n.y) {
            return invalid(format!("nodes {j} and {i} share position ({}, {})", n.x, n.y));
        }
    }
    let mut edges = Vec::new();
    for a in 0..nodes.len() {
        for b in a + 1..nodes.len() {
            let (pa, pb) = ((nodes[a].x, nodes[a].y), (nodes[b].x, nodes[b].y));
            let d = distance(pa, pb);
            if d > limits.max_link_distance_m {
                continue;
            }
            let outage = link_outage(pa, pb, channel)?;
            if outage > limits.outage_cap {
                continue;
            }
            edges.push(Edge { a, b, distance_m: d, outage, weight: edge_weight(outage) });
        }
    }
    Ok(WeightedGraph { nodes, edges, n_sensors: sensors.len(), n_candidates: candidates.len() })
}
