use std::time::{Duration, Instant};

use super::model::{MilpModel, VarRole};
use super::problem::{CoverageProblem, PlacementSolution};
use super::simplex::{solve_lp, LpStatus};
use crate::error::{invalid, Error, Result};

const INT_TOL: f64 = 1e-6;
const OBJ_TOL: f64 = 1e-6;

/// Outcome of a branch-and-bound run on a general model.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpOutcome {
    /// Best integer solution found, if any beat the starting incumbent.
    pub x: Option<Vec<f64>>,
    pub objective: f64,
    /// True when the search tree was exhausted.
    pub complete: bool,
    pub nodes: usize,
}

struct Node {
    lb: Vec<f64>,
    ub: Vec<f64>,
    bound: f64,
    id: usize,
}

/// Search settings. With `target` set the run stops at the first solution
/// reaching it and prunes nodes that cannot.
#[derive(Debug, Clone, Copy)]
pub struct BnbSettings {
    pub deadline: Option<Instant>,
    pub incumbent: f64,
    pub target: Option<f64>,
}

fn integral_objective(model: &MilpModel) -> bool {
    model.vars.iter().all(|v| v.obj == 0.0 || (v.integer && v.obj.fract() == 0.0))
}

/// Picks the branching column: fractional placement variables first, the one
/// closest to 0.5, ties to the lowest column; then any other integer column.
fn branch_column(model: &MilpModel, x: &[f64]) -> Option<usize> {
    let mut best: Option<(bool, f64, usize)> = None;
    for (j, v) in model.vars.iter().enumerate() {
        if !v.integer {
            continue;
        }
        let f = x[j] - x[j].floor();
        if f < INT_TOL || f > 1.0 - INT_TOL {
            continue;
        }
        let key = (!matches!(v.role, VarRole::Placement(_)), (f - 0.5).abs(), j);
        if best.is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
            best = Some(key);
        }
    }
    best.map(|b| b.2)
}

/// Depth-first dives (up branch first) restarted from the best open bound.
pub fn branch_and_bound(model: &MilpModel, lb: Vec<f64>, ub: Vec<f64>, settings: BnbSettings) -> Result<MilpOutcome> {
    let integral = integral_objective(model);
    let effective = |b: f64| if integral { (b + OBJ_TOL).floor() } else { b };
    let mut incumbent = settings.incumbent;
    let mut best_x = None;
    let dominated = |bound: f64, inc: f64| match settings.target {
        Some(t) => effective(bound) < t - OBJ_TOL,
        None => effective(bound) <= inc + OBJ_TOL,
    };
    let reached = |inc: f64| settings.target.is_some_and(|t| inc >= t - OBJ_TOL);

    let mut open: Vec<Node> = Vec::new();
    let mut next_id = 1;
    let mut dive = Some(Node { lb, ub, bound: f64::INFINITY, id: 0 });
    let mut nodes = 0usize;
    loop {
        let node = match dive.take() {
            Some(n) => n,
            None => {
                open.retain(|n| !dominated(n.bound, incumbent));
                let Some(pos) = open
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.bound.total_cmp(&b.1.bound).then(b.1.id.cmp(&a.1.id)))
                    .map(|(i, _)| i)
                else {
                    return Ok(MilpOutcome { x: best_x, objective: incumbent, complete: true, nodes });
                };
                open.swap_remove(pos)
            }
        };
        if settings.deadline.is_some_and(|d| Instant::now() >= d) {
            return Ok(MilpOutcome { x: best_x, objective: incumbent, complete: false, nodes });
        }
        if dominated(node.bound, incumbent) {
            continue;
        }
        nodes += 1;
        let lp = solve_lp(model, &node.lb, &node.ub)?;
        match lp.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => return Err(Error::Internal("LP relaxation is unbounded".into())),
            LpStatus::Optimal => {}
        }
        if dominated(lp.objective, incumbent) {
            continue;
        }
        match branch_column(model, &lp.x) {
            None => {
                let mut x = lp.x;
                for (xj, v) in x.iter_mut().zip(&model.vars) {
                    if v.integer {
                        *xj = xj.round();
                    }
                }
                let obj = model.objective(&x);
                if obj > incumbent + OBJ_TOL {
                    incumbent = obj;
                    best_x = Some(x);
                }
                if reached(incumbent) && best_x.is_some() {
                    return Ok(MilpOutcome { x: best_x, objective: incumbent, complete: false, nodes });
                }
            }
            Some(j) => {
                let v = lp.x[j];
                let mut down_ub = node.ub.clone();
                down_ub[j] = v.floor();
                open.push(Node { lb: node.lb.clone(), ub: down_ub, bound: lp.objective, id: next_id });
                let mut up_lb = node.lb;
                up_lb[j] = v.ceil();
                dive = Some(Node { lb: up_lb, ub: node.ub, bound: lp.objective, id: next_id + 1 });
                next_id += 2;
            }
        }
    }
}

/// Greedy max-marginal-weight placement, ties to the lowest index.
pub fn greedy_placement(problem: &CoverageProblem) -> Vec<usize> {
    let w = problem.weights();
    let mut covered = vec![false; w.len()];
    let mut chosen = Vec::new();
    for _ in 0..problem.k {
        let mut best: Option<(usize, f64)> = None;
        for (c, cand) in problem.candidates.iter().enumerate() {
            if chosen.contains(&c) {
                continue;
            }
            let gain: f64 = (0..w.len()).filter(|&p| cand.covered[p] && !covered[p]).map(|p| w[p]).sum();
            if best.is_none_or(|b| gain > b.1) {
                best = Some((c, gain));
            }
        }
        match best {
            Some((c, g)) if g > 0.0 => {
                chosen.push(c);
                for (o, &v) in covered.iter_mut().zip(&problem.candidates[c].covered) {
                    *o |= v;
                }
            }
            _ => break,
        }
    }
    chosen.sort_unstable();
    chosen
}

fn chosen_from(x: &[f64], cols: &[usize]) -> Vec<usize> {
    cols.iter().enumerate().filter(|(_, &j)| x[j] > 0.5).map(|(c, _)| c).collect()
}

fn bounds(model: &MilpModel) -> (Vec<f64>, Vec<f64>) {
    (model.vars.iter().map(|v| v.lb).collect(), model.vars.iter().map(|v| v.ub).collect())
}

/// Exact max-coverage solve of an encoded coverage model (original or
/// standard form). Among optimal placements the lexicographically smallest
/// sorted index list is returned.
pub fn solve_exact(model: &MilpModel, time_budget: Option<Duration>) -> Result<PlacementSolution> {
    model.validate()?;
    let Some(problem) = model.problem.as_ref() else {
        return invalid("model does not encode a coverage problem");
    };
    let cols = model.placement_columns();
    if cols.len() != problem.candidates.len() {
        return invalid("model placement columns do not match its candidates");
    }
    let deadline = time_budget.map(|b| Instant::now() + b);

    let greedy = greedy_placement(problem);
    let greedy_obj = problem.evaluate(&greedy, false).objective;
    let (lb, ub) = bounds(model);
    let run = branch_and_bound(
        model,
        lb.clone(),
        ub.clone(),
        BnbSettings { deadline, incumbent: greedy_obj, target: None },
    )?;
    let mut best = match &run.x {
        Some(x) => chosen_from(x, &cols),
        None => greedy,
    };
    let value = problem.evaluate(&best, false).objective;
    if !run.complete {
        return Ok(problem.evaluate(&best, false));
    }

    // Fix the smallest index that still admits an optimum, position by position.
    let mut prefix: Vec<usize> = Vec::new();
    'outer: while prefix.len() < best.len() {
        if problem.evaluate(&prefix, false).objective >= value - OBJ_TOL {
            best = prefix.clone();
            break;
        }
        let start = prefix.last().map_or(0, |&p| p + 1);
        let next = best[prefix.len()];
        for c in start..next {
            let (mut l, mut u) = (lb.clone(), ub.clone());
            for i in 0..c {
                if !prefix.contains(&i) {
                    u[cols[i]] = 0.0;
                }
            }
            for &i in prefix.iter().chain(std::iter::once(&c)) {
                l[cols[i]] = 1.0;
            }
            let probe = branch_and_bound(
                model,
                l,
                u,
                BnbSettings { deadline, incumbent: f64::NEG_INFINITY, target: Some(value) },
            )?;
            if let Some(x) = probe.x {
                best = chosen_from(&x, &cols);
                prefix.push(c);
                continue 'outer;
            }
            if !probe.complete {
                // Out of time: the objective is proven, the tie-break is not.
                break 'outer;
            }
        }
        prefix.push(next);
    }
    Ok(problem.evaluate(&best, true))
}
