//! Experiment orchestration: config files, parameter sweeps, CSV output and
//! reports.

mod budget;
mod config;
mod oscillation;
mod pattern;
mod rows;
mod sweep;

pub use budget::{link_budget_report, LinkBudget, EIRP_CAP_DBM, HEIGHT_RANGE};
pub use config::{load_scenario, parse_scenario, scenario_to_json};
pub use oscillation::{dominant_spatial_frequency, oscillation_frequency_estimate};
pub use pattern::pattern_dump;
pub use rows::{
    format_real, read_pattern_csv, read_sweep_csv, sweep_header, write_pattern_csv, write_sweep_csv, PatternRow,
    SweepRow, PATTERN_COLUMNS,
};
pub use sweep::{
    best_system, capacity_height_scan, default_beam_candidates, evaluate_system, run_height_sweep, run_power_sweep,
    SweepSpec, SweepVariable, SystemTag, DEFAULT_HEIGHT_STEP, FINE_HEIGHT_STEP,
};
