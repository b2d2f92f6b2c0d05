use serde::{Deserialize, Serialize};

use super::fov::{project_fov, CoverageMask, FovPattern, Mount};
use super::grid::Grid;
use crate::error::{invalid, Result};

/// Candidate mount generation: one mount per grid point, times quantized yaws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateSpec {
    /// Skip the outermost ring of grid points (sensors sit off the walls).
    pub exclude_border: bool,
    pub yaw_step_deg: u32,
    /// Drop yaws that only repeat a footprint already listed.
    pub reduce_symmetry: bool,
}

impl Default for CandidateSpec {
    fn default() -> Self {
        CandidateSpec { exclude_border: true, yaw_step_deg: 15, reduce_symmetry: true }
    }
}

impl CandidateSpec {
    pub fn yaws(&self, pattern: &FovPattern) -> Result<Vec<f64>> {
        if self.yaw_step_deg == 0 || 360 % self.yaw_step_deg != 0 {
            return invalid("yaw step must divide 360");
        }
        let period = if self.reduce_symmetry { pattern.symmetry_period_deg() } else { 360 };
        Ok((0..360)
            .step_by(self.yaw_step_deg as usize)
            .filter(|&y| y < period.max(1))
            .map(f64::from)
            .collect())
    }
}

/// Candidate mounts in row-major position order, yaw ascending within a position.
pub fn candidate_mounts(grid: &Grid, pattern: &FovPattern, spec: &CandidateSpec) -> Result<Vec<CoverageMask>> {
    let yaws = spec.yaws(pattern)?;
    let skip = usize::from(spec.exclude_border);
    if grid.nx <= 2 * skip || grid.ny <= 2 * skip {
        return invalid("grid too small for interior candidate mounts");
    }
    let mut out = Vec::new();
    for iy in skip..grid.ny - skip {
        for ix in skip..grid.nx - skip {
            let (x, y) = grid.points[grid.index(ix, iy)];
            for &yaw in &yaws {
                out.push(project_fov(pattern, Mount::new(x, y, yaw), grid)?);
            }
        }
    }
    Ok(out)
}
