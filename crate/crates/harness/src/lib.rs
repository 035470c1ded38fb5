//! Experiment harness for the `holodfrc` crate: scenario loading, seeding,
//! convergence traces, Monte-Carlo parameter sweeps and CSV/JSON output.

pub mod convergence;
pub mod csv;
pub mod sweep;

use std::path::Path;

use holodfrc::scenario::ScenarioConfig;
use sha2::{Digest, Sha256};

pub use convergence::{run_convergence, ConvergenceOptions, ConvergenceRun, RunRecord};
pub use csv::CsvTable;
pub use sweep::{run_sweep, SweepParam, SweepResult, SweepSpec};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] holodfrc::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
    #[error("malformed csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.display().to_string(), source }
}

/// Read a TOML scenario file. Absent keys take their defaults.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    Ok(ScenarioConfig::from_toml_str(&text)?)
}

/// SHA-256 of the canonical TOML rendering, lowercase hex.
pub fn scenario_hash(cfg: &ScenarioConfig) -> String {
    Sha256::digest(cfg.to_toml_string().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of trial `index` under `master`. All modes of a trial share it, so
/// they see the same channel realization.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Parse a comma-separated mode list; `all` selects the six modes.
pub fn parse_modes(list: &str) -> Result<Vec<holodfrc::orchestrator::Mode>> {
    if list.trim() == "all" {
        return Ok(holodfrc::orchestrator::Mode::ALL.to_vec());
    }
    let modes = list
        .split(',')
        .map(|s| s.trim().parse().map_err(|e: holodfrc::Error| HarnessError::Usage(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    if modes.is_empty() {
        return Err(HarnessError::Usage("empty mode list".into()));
    }
    Ok(modes)
}
