use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::graph::{Edge, WeightedGraph};
use crate::error::{invalid, Error, Result};

/// Largest candidate count the exact planner accepts.
pub const EXACT_LIMIT: usize = 20;
/// Candidate count up to which `Auto` uses the exact planner.
pub const AUTO_EXACT_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PlannerMode {
    #[default]
    Auto,
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaySolution {
    /// Chosen candidate indices, ascending.
    pub relays: Vec<usize>,
    pub relay_positions: Vec<(f64, f64)>,
    pub tree_edges: Vec<Edge>,
    pub tree_cost: f64,
    pub connected: bool,
    /// True when the relay count is proven minimal.
    pub exact: bool,
    /// Proven lower bound on the relay count.
    pub lower_bound: usize,
    pub n_sensors: usize,
    pub sink: usize,
}

/// Edges with both ends active and outage within the cap, in a fixed order.
fn usable_edges<'a>(graph: &'a WeightedGraph, active: &'a [bool], cap: f64) -> impl Iterator<Item = &'a Edge> + 'a {
    graph.edges.iter().filter(move |e| active[e.a] && active[e.b] && e.outage <= cap)
}

fn active_set(graph: &WeightedGraph, relays: &[usize]) -> Vec<bool> {
    let mut active = vec![false; graph.nodes.len()];
    for s in graph.sensors() {
        active[s] = true;
    }
    active[graph.sink()] = true;
    for &c in relays {
        active[graph.candidate_node(c)] = true;
    }
    active
}

/// Minimum spanning tree over the active nodes, or None if they are not
/// all connected. Ties follow (weight, a, b) order.
pub fn spanning_tree(graph: &WeightedGraph, relays: &[usize], cap: f64) -> Option<(Vec<Edge>, f64)> {
    let active = active_set(graph, relays);
    let mut edges: Vec<&Edge> = usable_edges(graph, &active, cap).collect();
    edges.sort_by(|x, y| x.weight.total_cmp(&y.weight).then(x.a.cmp(&y.a)).then(x.b.cmp(&y.b)));
    let mut uf = UnionFind::<usize>::new(graph.nodes.len());
    let mut tree = Vec::new();
    let mut cost = 0.0;
    for e in edges {
        if uf.union(e.a, e.b) {
            tree.push(*e);
            cost += e.weight;
        }
    }
    let need = active.iter().filter(|&&a| a).count() - 1;
    (tree.len() == need).then_some((tree, cost))
}

/// Components among sensors, the sink and the given relays that hold at
/// least one sensor or the sink.
fn terminal_components(graph: &WeightedGraph, relays: &[usize], cap: f64) -> usize {
    let active = active_set(graph, relays);
    let mut uf = UnionFind::<usize>::new(graph.nodes.len());
    for e in usable_edges(graph, &active, cap) {
        uf.union(e.a, e.b);
    }
    let mut roots: Vec<usize> = graph.sensors().chain(std::iter::once(graph.sink())).map(|v| uf.find(v)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

fn solution(graph: &WeightedGraph, relays: Vec<usize>, cap: f64, exact: bool, lower_bound: usize) -> RelaySolution {
    let (tree_edges, tree_cost) = spanning_tree(graph, &relays, cap).expect("feasible relay set");
    RelaySolution {
        relay_positions: relays.iter().map(|&c| {
            let n = graph.nodes[graph.candidate_node(c)];
            (n.x, n.y)
        }).collect(),
        relays,
        tree_edges,
        tree_cost,
        connected: true,
        exact,
        lower_bound,
        n_sensors: graph.n_sensors,
        sink: graph.sink(),
    }
}

fn infeasible(graph: &WeightedGraph, cap: f64) -> Error {
    let all: Vec<usize> = (0..graph.n_candidates).collect();
    let active = active_set(graph, &all);
    let mut uf = UnionFind::<usize>::new(graph.nodes.len());
    for e in usable_edges(graph, &active, cap) {
        uf.union(e.a, e.b);
    }
    let sink_root = uf.find(graph.sink());
    let mut worst: Vec<String> = Vec::new();
    for s in graph.sensors().filter(|&s| uf.find(s) != sink_root) {
        let best = graph.edges.iter().filter(|e| e.a == s || e.b == s).map(|e| e.outage).fold(f64::NAN, f64::min);
        if best.is_nan() {
            worst.push(format!("sensor {s}: no link within range under the cap"));
        } else {
            worst.push(format!("sensor {s}: cut off, best link outage {best:.4}"));
        }
    }
    Error::Infeasible(format!("no relay set connects every sensor: {}", worst.join("; ")))
}

/// Lexicographic subsets of {0..n} with exactly `size` elements.
fn for_each_subset(n: usize, size: usize, mut f: impl FnMut(&[usize])) {
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        f(&idx);
        // Rightmost position that can still advance.
        let Some(i) = (0..size).rev().find(|&i| idx[i] < n - size + i) else { return };
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Fewest relays, then cheapest spanning tree, then lexicographic subset.
pub fn place_relays_exact(graph: &WeightedGraph, cap: f64) -> Result<RelaySolution> {
    let n = graph.n_candidates;
    if n > EXACT_LIMIT {
        return Err(Error::SizeLimit(format!("{n} candidates exceed the exact planner limit {EXACT_LIMIT}")));
    }
    for size in 0..=n {
        let mut best: Option<(f64, Vec<usize>)> = None;
        for_each_subset(n, size, |s| {
            if let Some((_, cost)) = spanning_tree(graph, s, cap) {
                if best.as_ref().is_none_or(|b| cost < b.0) {
                    best = Some((cost, s.to_vec()));
                }
            }
        });
        if let Some((_, relays)) = best {
            return Ok(solution(graph, relays, cap, true, size));
        }
    }
    Err(infeasible(graph, cap))
}

/// Relay-count lower bound: each relay merges at most (its terminal-component
/// degree plus its candidate degree) components into one.
pub fn relay_lower_bound(graph: &WeightedGraph, cap: f64) -> usize {
    let c0 = terminal_components(graph, &[], cap);
    if c0 <= 1 {
        return 0;
    }
    let active = active_set(graph, &[]);
    let mut uf = UnionFind::<usize>::new(graph.nodes.len());
    for e in usable_edges(graph, &active, cap) {
        uf.union(e.a, e.b);
    }
    let mut delta = 0usize;
    for c in 0..graph.n_candidates {
        let v = graph.candidate_node(c);
        let mut comps = Vec::new();
        let mut cands = 0usize;
        for e in graph.edges.iter().filter(|e| (e.a == v || e.b == v) && e.outage <= cap) {
            let u = if e.a == v { e.b } else { e.a };
            if active[u] {
                comps.push(uf.find(u));
            } else {
                cands += 1;
            }
        }
        comps.sort_unstable();
        comps.dedup();
        delta = delta.max(comps.len() + cands);
    }
    if delta <= 1 {
        return usize::MAX;
    }
    (c0 - 1).div_ceil(delta - 1)
}

/// Greedy component-merging heuristic followed by redundancy pruning.
pub fn place_relays_greedy(graph: &WeightedGraph, cap: f64) -> Result<RelaySolution> {
    let lower_bound = relay_lower_bound(graph, cap);
    let mut chosen: Vec<usize> = Vec::new();
    let mut comps = terminal_components(graph, &chosen, cap);
    while comps > 1 {
        let free: Vec<usize> = (0..graph.n_candidates).filter(|c| !chosen.contains(c)).collect();
        if free.is_empty() {
            return Err(infeasible(graph, cap));
        }
        let with = |extra: &[usize]| {
            let mut s = chosen.clone();
            s.extend_from_slice(extra);
            terminal_components(graph, &s, cap)
        };
        let mut best: Option<(usize, Vec<usize>)> = None;
        for &c in &free {
            let k = with(&[c]);
            if k < comps && best.as_ref().is_none_or(|b| k < b.0) {
                best = Some((k, vec![c]));
            }
        }
        if best.is_none() {
            for (i, &a) in free.iter().enumerate() {
                for &b in &free[i + 1..] {
                    let k = with(&[a, b]);
                    if k < comps && best.as_ref().is_none_or(|x| k < x.0) {
                        best = Some((k, vec![a, b]));
                    }
                }
            }
        }
        match best {
            Some((k, add)) => {
                chosen.extend(add);
                comps = k;
            }
            None => {
                // Grow from whatever touches the current network and retry.
                let active = active_set(graph, &chosen);
                let touching = free.iter().copied().find(|&c| {
                    let v = graph.candidate_node(c);
                    graph.edges.iter().any(|e| e.outage <= cap && ((e.a == v && active[e.b]) || (e.b == v && active[e.a])))
                });
                match touching {
                    Some(c) => chosen.push(c),
                    None => return Err(infeasible(graph, cap)),
                }
            }
        }
    }
    chosen.sort_unstable();
    // Drop relays the network can do without, highest index first.
    for i in (0..chosen.len()).rev() {
        let mut trial = chosen.clone();
        trial.remove(i);
        if spanning_tree(graph, &trial, cap).is_some() {
            chosen = trial;
        }
    }
    if spanning_tree(graph, &chosen, cap).is_none() {
        return Err(infeasible(graph, cap));
    }
    let exact = lower_bound == chosen.len();
    Ok(solution(graph, chosen, cap, exact, lower_bound.min(graph.n_candidates)))
}

pub fn place_relays(graph: &WeightedGraph, cap: f64, mode: PlannerMode) -> Result<RelaySolution> {
    if !(0.0..1.0).contains(&cap) {
        return invalid("outage cap must lie in [0, 1)");
    }
    match mode {
        PlannerMode::Exact => place_relays_exact(graph, cap),
        PlannerMode::Heuristic => place_relays_greedy(graph, cap),
        PlannerMode::Auto if graph.n_candidates <= AUTO_EXACT_LIMIT => place_relays_exact(graph, cap),
        PlannerMode::Auto => place_relays_greedy(graph, cap),
    }
}

/// Cheapest spanning tree when any subset of `allowed` candidates may be
/// used, ignoring relay count. None if even all of them cannot connect.
pub fn min_tree_cost(graph: &WeightedGraph, allowed: &[usize], cap: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for size in 0..=allowed.len() {
        for_each_subset(allowed.len(), size, |s| {
            let relays: Vec<usize> = s.iter().map(|&i| allowed[i]).collect();
            if let Some((_, cost)) = spanning_tree(graph, &relays, cap) {
                if best.is_none_or(|b| cost < b) {
                    best = Some(cost);
                }
            }
        });
    }
    best
}

/// Delivery statistics of one sensor over the routing tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorDelivery {
    pub sensor: usize,
    pub hops: usize,
    /// Probability a packet crosses every hop on the first try.
    pub success: f64,
    /// Expected transmissions over the path with per-hop retries.
    pub expected_transmissions: f64,
    pub transmissions_per_day: f64,
}

/// Per-sensor path success and expected transmissions toward the sink.
pub fn evaluate_tree(solution: &RelaySolution, packets_per_day: f64) -> Result<Vec<SensorDelivery>> {
    if !solution.connected {
        return invalid("relay solution is not connected");
    }
    if !(packets_per_day >= 0.0) {
        return invalid("packets_per_day must be nonnegative");
    }
    let n = solution.tree_edges.iter().map(|e| e.a.max(e.b)).max().unwrap_or(0).max(solution.sink) + 1;
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in &solution.tree_edges {
        adj[e.a].push((e.b, e.outage));
        adj[e.b].push((e.a, e.outage));
    }
    // Walk the tree from the sink, recording each node's parent link.
    let mut parent: Vec<Option<(usize, f64)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut stack = vec![solution.sink];
    seen[solution.sink] = true;
    while let Some(u) = stack.pop() {
        for &(v, p) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some((u, p));
                stack.push(v);
            }
        }
    }
    (0..solution.n_sensors)
        .map(|s| {
            if s >= n || !seen[s] {
                return invalid(format!("sensor {s} is not attached to the tree"));
            }
            let (mut hops, mut success, mut tx) = (0usize, 1.0, 0.0);
            let mut v = s;
            while let Some((u, p)) = parent[v] {
                hops += 1;
                success *= 1.0 - p;
                tx += 1.0 / (1.0 - p);
                v = u;
            }
            Ok(SensorDelivery {
                sensor: s,
                hops,
                success,
                expected_transmissions: tx,
                transmissions_per_day: tx * packets_per_day,
            })
        })
        .collect()
}
