//! Work-plane grids, PIR footprints and sensing holes.

pub mod candidates;
pub mod fov;
pub mod grid;
pub mod holes;

pub use candidates::{candidate_mounts, CandidateSpec};
pub use fov::{covered_fraction, hole_fraction, is_detectable, project_fov, CoverageMask, FovPattern, Mount, Ring};
pub use grid::{discretize_area, discretize_area_with, Grid, GridLayout, Rect, WeightRegion, WeightSpec};
pub use holes::{local_hole_sizes, union};
