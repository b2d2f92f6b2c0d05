use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const EPS: f64 = 1e-9;

/// Axis-aligned rectangle on the work plane, closed on all sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 - EPS && x <= self.x1 + EPS && y >= self.y0 - EPS && y <= self.y1 + EPS
    }

    fn is_proper(&self) -> bool {
        self.x0.is_finite() && self.y0.is_finite() && self.x1 > self.x0 && self.y1 > self.y0
    }
}

/// A rectangle whose points receive `weight` instead of the base weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightRegion {
    pub rect: Rect,
    pub weight: f64,
}

/// How per-point weights are assigned. Later regions override earlier ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightSpec {
    Uniform,
    Regions { base: f64, regions: Vec<WeightRegion> },
}

/// Where sample points sit relative to the step lattice.
///
/// `Nodes` puts points on step multiples including both borders, so a 1 m
/// square at 1 m step yields its four corners. `Cells` puts one point at the
/// center of each full step cell, which is how an office of 3.3 x 2.4 m at
/// 0.3 m becomes exactly 11 x 8 points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GridLayout {
    #[default]
    Nodes,
    Cells,
}

/// Weighted point grid over a rectangular area. Points are stored row by
/// row: index = iy * nx + ix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub width_m: f64,
    pub depth_m: f64,
    pub step_m: f64,
    pub layout: GridLayout,
    pub nx: usize,
    pub ny: usize,
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

/// Grid with points on step multiples including both borders.
pub fn discretize_area(width_m: f64, depth_m: f64, step_m: f64, spec: &WeightSpec) -> Result<Grid> {
    discretize_area_with(width_m, depth_m, step_m, GridLayout::Nodes, spec)
}

pub fn discretize_area_with(
    width_m: f64,
    depth_m: f64,
    step_m: f64,
    layout: GridLayout,
    spec: &WeightSpec,
) -> Result<Grid> {
    for (name, v) in [("width", width_m), ("depth", depth_m), ("step", step_m)] {
        if !(v.is_finite() && v > 0.0) {
            return invalid(format!("{name} must be positive, got {v}"));
        }
    }
    if step_m > width_m.min(depth_m) + EPS {
        return invalid(format!("step {step_m} exceeds the smaller area side"));
    }
    let cells_x = (width_m / step_m + EPS).floor() as usize;
    let cells_y = (depth_m / step_m + EPS).floor() as usize;
    let (nx, ny, offset) = match layout {
        GridLayout::Nodes => (cells_x + 1, cells_y + 1, 0.0),
        GridLayout::Cells => (cells_x, cells_y, 0.5),
    };
    let mut points = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let x = ((ix as f64 + offset) * step_m).min(width_m);
            let y = ((iy as f64 + offset) * step_m).min(depth_m);
            points.push((x, y));
        }
    }
    let area = Rect::new(0.0, 0.0, width_m, depth_m);
    let weights = match spec {
        WeightSpec::Uniform => vec![1.0; points.len()],
        WeightSpec::Regions { base, regions } => {
            if !(base.is_finite() && *base >= 0.0) {
                return invalid(format!("base weight must be nonnegative, got {base}"));
            }
            for (i, r) in regions.iter().enumerate() {
                if !r.rect.is_proper() {
                    return invalid(format!("weight region {i} is degenerate"));
                }
                let inside = area.contains(r.rect.x0, r.rect.y0) && area.contains(r.rect.x1, r.rect.y1);
                if !inside {
                    return invalid(format!("weight region {i} lies outside the area"));
                }
                if !(r.weight.is_finite() && r.weight >= 0.0) {
                    return invalid(format!("weight region {i} has a negative weight"));
                }
            }
            points
                .iter()
                .map(|&(x, y)| {
                    regions
                        .iter()
                        .rev()
                        .find(|r| r.rect.contains(x, y))
                        .map_or(*base, |r| r.weight)
                })
                .collect()
        }
    };
    if !weights.iter().any(|&w| w > 0.0) {
        return invalid("at least one grid weight must be positive");
    }
    Ok(Grid { width_m, depth_m, step_m, layout, nx, ny, points, weights })
}

impl Grid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        Rect::new(0.0, 0.0, self.width_m, self.depth_m).contains(x, y)
    }

    /// Index of the grid point closest to (x, y); ties go to the lower index.
    pub fn nearest(&self, x: f64, y: f64) -> usize {
        let offset = match self.layout {
            GridLayout::Nodes => 0.0,
            GridLayout::Cells => 0.5,
        };
        let snap = |v: f64, n: usize| -> usize {
            let f = (v / self.step_m - offset).round();
            f.clamp(0.0, (n - 1) as f64) as usize
        };
        self.index(snap(x, self.nx), snap(y, self.ny))
    }

    /// Points falling inside `rect`.
    pub fn region_mask(&self, rect: &Rect) -> Vec<bool> {
        self.points.iter().map(|&(x, y)| rect.contains(x, y)).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}
