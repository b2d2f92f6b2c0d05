use serde::{Deserialize, Serialize};

use super::grid::{Grid, Rect};
use crate::error::{invalid, Result};

const EPS: f64 = 1e-9;

/// One ring of square beam footprints. Lengths are given at floor level and
/// shrink onto the work plane by similar triangles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub radius_m: f64,
    pub beam_count: u32,
    pub side_m: f64,
}

/// Ceiling PIR field of view as concentric rings of discrete beams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FovPattern {
    pub mount_height_m: f64,
    pub plane_height_m: f64,
    pub rings: Vec<Ring>,
    pub max_range_m: f64,
}

/// Ceiling mount pose. Yaw is in degrees, counter-clockwise from +x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mount {
    pub x: f64,
    pub y: f64,
    pub yaw_deg: f64,
}

impl Mount {
    pub fn new(x: f64, y: f64, yaw_deg: f64) -> Self {
        Mount { x, y, yaw_deg }
    }
}

/// Per-point coverage of one mounted sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageMask {
    pub covered: Vec<bool>,
    pub in_range: Vec<bool>,
    pub source_mount: Mount,
}

impl CoverageMask {
    pub fn covered_count(&self) -> usize {
        self.covered.iter().filter(|&&c| c).count()
    }

    pub fn in_range_count(&self) -> usize {
        self.in_range.iter().filter(|&&c| c).count()
    }
}

impl FovPattern {
    pub fn validate(&self) -> Result<()> {
        if !(self.mount_height_m.is_finite() && self.mount_height_m > 0.0) {
            return invalid("mount height must be positive");
        }
        if !(self.plane_height_m >= 0.0 && self.plane_height_m < self.mount_height_m) {
            return invalid("plane height must lie in [0, mount height)");
        }
        if !(self.max_range_m.is_finite() && self.max_range_m > 0.0) {
            return invalid("max range must be positive");
        }
        for (i, r) in self.rings.iter().enumerate() {
            if r.beam_count == 0 {
                return invalid(format!("ring {i} has no beams"));
            }
            if !(r.side_m.is_finite() && r.side_m > 0.0) {
                return invalid(format!("ring {i} footprint side must be positive"));
            }
            if !(r.radius_m >= 0.0 && r.radius_m <= self.max_range_m) {
                return invalid(format!("ring {i} radius must lie in [0, max range]"));
            }
        }
        Ok(())
    }

    /// Similar-triangles factor from floor level to the work plane.
    pub fn scale(&self) -> f64 {
        (self.mount_height_m - self.plane_height_m) / self.mount_height_m
    }

    pub fn projected_range(&self) -> f64 {
        self.max_range_m * self.scale()
    }

    /// True if the plane point at offset (dx, dy) from the mount lies in a beam.
    pub fn footprint_contains(&self, yaw_deg: f64, dx: f64, dy: f64) -> bool {
        let sc = self.scale();
        if dx.hypot(dy) > self.max_range_m * sc + EPS {
            return false;
        }
        let yaw = yaw_deg.to_radians();
        self.rings.iter().any(|ring| {
            let half = 0.5 * ring.side_m * sc;
            let n = ring.beam_count as f64;
            (0..ring.beam_count).any(|j| {
                let th = yaw + std::f64::consts::TAU * j as f64 / n;
                let (s, c) = th.sin_cos();
                let qx = dx - c * ring.radius_m * sc;
                let qy = dy - s * ring.radius_m * sc;
                let u = qx * c + qy * s;
                let v = -qx * s + qy * c;
                u.abs() <= half + EPS && v.abs() <= half + EPS
            })
        })
    }

    /// Smallest yaw rotation (whole degrees) mapping the footprint onto itself.
    pub fn symmetry_period_deg(&self) -> u32 {
        let mut period = 1u32;
        for ring in &self.rings {
            let n = ring.beam_count;
            let p = if 360 % n != 0 {
                360
            } else if ring.radius_m == 0.0 {
                gcd(360 / n, 90)
            } else {
                360 / n
            };
            period = lcm(period, p).min(360);
        }
        if self.rings.is_empty() {
            1
        } else {
            period
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

/// Covered points of `grid` for `pattern` mounted at `mount`.
pub fn project_fov(pattern: &FovPattern, mount: Mount, grid: &Grid) -> Result<CoverageMask> {
    pattern.validate()?;
    if !grid.contains(mount.x, mount.y) {
        return invalid(format!("mount ({}, {}) lies outside the area", mount.x, mount.y));
    }
    let range = pattern.projected_range() + EPS;
    let mut covered = Vec::with_capacity(grid.len());
    let mut in_range = Vec::with_capacity(grid.len());
    for &(x, y) in &grid.points {
        let (dx, dy) = (x - mount.x, y - mount.y);
        let r = dx.hypot(dy) <= range;
        in_range.push(r);
        covered.push(r && pattern.footprint_contains(mount.yaw_deg, dx, dy));
    }
    Ok(CoverageMask { covered, in_range, source_mount: mount })
}

/// Uncovered share of in-range points, optionally restricted to `region`.
pub fn hole_fraction(mask: &CoverageMask, grid: &Grid, region: Option<&Rect>) -> Result<f64> {
    Ok(1.0 - covered_fraction(mask, grid, region)?)
}

/// Covered share of in-range points, optionally restricted to `region`.
pub fn covered_fraction(mask: &CoverageMask, grid: &Grid, region: Option<&Rect>) -> Result<f64> {
    if mask.covered.len() != grid.len() || mask.in_range.len() != grid.len() {
        return invalid("mask and grid point counts differ");
    }
    let mut total = 0usize;
    let mut hit = 0usize;
    for (i, &(x, y)) in grid.points.iter().enumerate() {
        if !mask.in_range[i] || region.is_some_and(|r| !r.contains(x, y)) {
            continue;
        }
        total += 1;
        hit += usize::from(mask.covered[i]);
    }
    if total == 0 {
        return invalid("no in-range grid points in the requested region");
    }
    Ok(hit as f64 / total as f64)
}

/// Smallest motion a hole can hide, as a rule of thumb from hand motions.
pub const HAND_MOTION_FLOOR_M: f64 = 0.6;

/// A motion is seen when its hole is no larger than the motion itself or the
/// hand-motion floor, whichever is larger.
pub fn is_detectable(motion_extent_m: f64, local_hole_size_m: f64) -> Result<bool> {
    if motion_extent_m.is_nan() || local_hole_size_m.is_nan() || motion_extent_m < 0.0 || local_hole_size_m < 0.0 {
        return invalid("motion extent and hole size must be nonnegative");
    }
    Ok(local_hole_size_m <= motion_extent_m.max(HAND_MOTION_FLOOR_M))
}
