use serde::{Deserialize, Serialize};

use super::trace::{ActivityTrace, EventKind};
use crate::error::{invalid, Result};
use crate::geometry::{is_detectable, local_hole_sizes, CoverageMask, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub t_s: f64,
    pub kind: EventKind,
}

/// Union coverage of a sensor set together with its local hole sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingField {
    pub covered: Vec<bool>,
    pub holes: Vec<f64>,
}

impl SensingField {
    pub fn new(masks: &[CoverageMask], grid: &Grid) -> Result<Self> {
        let mut covered = vec![false; grid.len()];
        for (i, m) in masks.iter().enumerate() {
            if m.covered.len() != grid.len() {
                return invalid(format!("mask {i} does not match the grid"));
            }
            for (o, &c) in covered.iter_mut().zip(&m.covered) {
                *o |= c;
            }
        }
        let holes = local_hole_sizes(&covered, grid);
        Ok(SensingField { covered, holes })
    }

    /// Doorway events are always seen; motions need a covered nearest point
    /// whose hole the motion can bridge.
    pub fn sees(&self, grid: &Grid, kind: EventKind, x: f64, y: f64, extent_m: f64) -> Result<bool> {
        if kind != EventKind::Motion {
            return Ok(true);
        }
        let p = grid.nearest(x, y);
        Ok(self.covered[p] && is_detectable(extent_m, self.holes[p])?)
    }
}

/// Detected subset of the trace's events.
pub fn detect(trace: &ActivityTrace, masks: &[CoverageMask], grid: &Grid) -> Result<Vec<Detection>> {
    let field = SensingField::new(masks, grid)?;
    detect_with(trace, &field, grid)
}

pub fn detect_with(trace: &ActivityTrace, field: &SensingField, grid: &Grid) -> Result<Vec<Detection>> {
    let mut out = Vec::new();
    for e in &trace.events {
        if field.sees(grid, e.kind, e.x, e.y, e.extent_m)? {
            out.push(Detection { t_s: e.t_s, kind: e.kind });
        }
    }
    Ok(out)
}
