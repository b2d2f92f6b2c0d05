//! Duty-cycled mote lifetimes and the bargained wake-up period.

pub mod bargain;
pub mod energy;

pub use bargain::{bargain_period, log_nash, PERIOD_TOL_S, nash_bargain, sweep_alpha, threat_points, GameSolution};
pub use energy::{lifetime_sensor, lifetime_switch, MoteEnergyParams};
