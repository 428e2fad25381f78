use std::path::Path;

use crate::error::Result;
use crate::geometry::ScenarioConfig;

/// Parses and validates a scenario JSON document.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = serde_json::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig> {
    parse_scenario(&std::fs::read_to_string(path)?)
}

pub fn scenario_to_json(cfg: &ScenarioConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("config serializes")
}
