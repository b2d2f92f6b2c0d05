//! Named presets shipped with the toolkit.

use crate::geometry::{FovPattern, Ring};
use crate::lifetime::MoteEnergyParams;

pub const DEFAULT_FOV: &str = "pir-rings-v1";
pub const DEFAULT_ENERGY: &str = "aa-lpl-v1";
pub const PAPER_OFFICE: &str = "paper-office";

/// Environment variable naming a directory of extra preset files.
pub const PRESET_DIR_ENV: &str = "OCCUSENSE_PRESET_DIR";

/// Scenario text of the 3.3 x 2.4 m single-desk office.
pub const PAPER_OFFICE_TOML: &str = include_str!("../../../../presets/paper-office.toml");

/// Ceiling PIR with a three-beam center cluster and two outer rings.
pub fn fov_preset(name: &str) -> Option<FovPattern> {
    match name {
        DEFAULT_FOV => Some(FovPattern {
            mount_height_m: 2.7,
            plane_height_m: 0.75,
            max_range_m: 2.8,
            rings: vec![
                Ring { radius_m: 0.0, beam_count: 3, side_m: 0.57 },
                Ring { radius_m: 0.77, beam_count: 12, side_m: 0.5 },
                Ring { radius_m: 2.53, beam_count: 24, side_m: 0.4 },
            ],
        }),
        _ => None,
    }
}

pub fn energy_preset(name: &str) -> Option<MoteEnergyParams> {
    match name {
        DEFAULT_ENERGY => Some(MoteEnergyParams::default()),
        _ => None,
    }
}
