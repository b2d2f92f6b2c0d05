use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{CoverageMask, Grid, Mount, Rect};

/// Weighted max-coverage instance over precomputed candidate masks.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageProblem {
    pub grid: Grid,
    pub candidates: Vec<CoverageMask>,
    pub k: usize,
}

impl CoverageProblem {
    pub fn new(grid: Grid, candidates: Vec<CoverageMask>, k: usize) -> Result<Self> {
        let p = CoverageProblem { grid, candidates, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.candidates.is_empty() {
            return invalid("candidate list is empty");
        }
        if self.k == 0 || self.k > self.candidates.len() {
            return invalid(format!("k must lie in [1, {}], got {}", self.candidates.len(), self.k));
        }
        let n = self.grid.len();
        if let Some(i) = self.candidates.iter().position(|c| c.covered.len() != n || c.in_range.len() != n) {
            return invalid(format!("candidate {i} mask size differs from the grid point count {n}"));
        }
        Ok(())
    }

    pub fn weights(&self) -> &[f64] {
        &self.grid.weights
    }

    /// Objective and coverage of an explicit candidate subset.
    pub fn evaluate(&self, indices: &[usize], optimal: bool) -> PlacementSolution {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let mut covered = vec![false; self.grid.len()];
        for &c in &idx {
            for (o, &v) in covered.iter_mut().zip(&self.candidates[c].covered) {
                *o |= v;
            }
        }
        let objective = weighted_sum(&covered, &self.grid.weights);
        PlacementSolution {
            mounts: idx.iter().map(|&c| self.candidates[c].source_mount).collect(),
            indices: idx,
            weighted_fraction: objective / self.grid.total_weight(),
            covered,
            objective,
            optimal,
        }
    }
}

/// Sum of weights over covered points, in point order.
pub fn weighted_sum(covered: &[bool], weights: &[f64]) -> f64 {
    covered.iter().zip(weights).filter(|(c, _)| **c).map(|(_, w)| *w).sum()
}

/// Chosen mounts and what they cover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementSolution {
    pub indices: Vec<usize>,
    pub mounts: Vec<Mount>,
    pub covered: Vec<bool>,
    pub objective: f64,
    pub weighted_fraction: f64,
    pub optimal: bool,
}

impl PlacementSolution {
    /// Share of grid points inside `region` that are covered.
    pub fn region_coverage(&self, grid: &Grid, region: &Rect) -> Result<f64> {
        let inside = grid.region_mask(region);
        let total = inside.iter().filter(|&&b| b).count();
        if total == 0 {
            return invalid("region contains no grid points");
        }
        let hit = inside.iter().zip(&self.covered).filter(|(i, c)| **i && **c).count();
        Ok(hit as f64 / total as f64)
    }
}

/// Baseline that trusts the nominal range disc: pick the candidate reaching
/// the most points, ties to the lowest index, then report what it truly covers.
pub fn hole_unaware_placement(problem: &CoverageProblem) -> Result<PlacementSolution> {
    problem.validate()?;
    if problem.k != 1 {
        return invalid("hole-unaware placement is defined for k = 1");
    }
    let mut best = 0;
    let mut best_count = 0;
    for (i, c) in problem.candidates.iter().enumerate() {
        let n = c.in_range_count();
        if n > best_count {
            best = i;
            best_count = n;
        }
    }
    Ok(problem.evaluate(&[best], false))
}
