//! Maximum PIR coverage: model construction, Big-M standard form and exact solvers.

pub mod bnb;
pub mod brute;
pub mod model;
pub mod problem;
pub mod simplex;

pub use bnb::{branch_and_bound, greedy_placement, solve_exact, BnbSettings, MilpOutcome};
pub use brute::brute_force_placement;
pub use model::{big_m_standard_form, build_mpc, derived_big_m, Constraint, MilpModel, RowKind, Sense, VarRole, Variable};
pub use problem::{hole_unaware_placement, weighted_sum, CoverageProblem, PlacementSolution};
pub use simplex::{solve_lp, LpSolution, LpStatus};
