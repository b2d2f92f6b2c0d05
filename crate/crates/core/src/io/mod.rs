//! Scenario files, presets and byte-stable output formatting.

pub mod format;
pub mod presets;
pub mod scenario;

pub use format::{fmt_sig9, round9, sha256_hex, write_atomic, CsvTable};
pub use presets::{energy_preset, fov_preset, DEFAULT_ENERGY, DEFAULT_FOV, PAPER_OFFICE, PAPER_OFFICE_TOML, PRESET_DIR_ENV};
pub use scenario::{parse_scenario, preset_dir, Scenario, ScenarioError, SCHEMA_VERSION};
