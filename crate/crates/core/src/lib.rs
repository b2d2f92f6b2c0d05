//! Planning and evaluation of battery-operated PIR occupancy sensing.

pub mod app;
pub mod error;
pub mod geometry;
pub mod io;
pub mod lifetime;
pub mod placement;
pub mod relay;
pub mod sim;

pub use error::{Error, Result};
