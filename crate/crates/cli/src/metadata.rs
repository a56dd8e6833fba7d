use std::path::Path;

use bjnl::simgen::SimScenario;
use bjnl::Hyperparams;
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureRecord {
    pub kind: String,
    pub message: String,
}

/// Everything needed to rerun a command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetadata {
    pub format_version: u32,
    pub tool_version: String,
    pub command: String,
    pub status: String,
    pub seed: u64,
    pub inputs: Vec<String>,
    pub config_file: Option<String>,
    /// Settings taken from command-line flags, which win over the config file.
    pub overrides: Vec<String>,
    pub hyperparameters: Option<Hyperparams>,
    pub scenario: Option<SimScenario>,
    pub iterations: Option<usize>,
    pub wall_time_secs: Option<f64>,
    pub failure: Option<FailureRecord>,
}

impl RunMetadata {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            status: "ok".into(),
            seed,
            inputs: Vec::new(),
            config_file: None,
            overrides: Vec::new(),
            hyperparameters: None,
            scenario: None,
            iterations: None,
            wall_time_secs: None,
            failure: None,
        }
    }

    pub fn write(&self, dir: &Path) -> bjnl::Result<()> {
        bjnl::inference::output::write_json(&dir.join("run_metadata.json"), self)
    }

    pub fn read(dir: &Path) -> Option<Self> {
        bjnl::inference::output::read_json(&dir.join("run_metadata.json")).ok()
    }
}
