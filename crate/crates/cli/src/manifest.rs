//! The scenario run manifest.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use standsim::{Error, Result, ScenarioKind};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// Inputs of one `scenario` invocation. When `stands` is empty, the
/// synthetic generator supplies five stands from `seed`; the seed has
/// no other effect.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    #[serde(default)]
    pub stands: Vec<PathBuf>,
    #[serde(default)]
    pub growth_params: Option<PathBuf>,
    #[serde(default)]
    pub econ_config: Option<PathBuf>,
    /// Scenario kind names; all four when omitted.
    #[serde(default)]
    pub scenarios: Vec<String>,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn from_json_str(json: &str) -> Result<Self> {
        let manifest: RunManifest =
            serde_json::from_str(json).map_err(|e| Error::schema(format!("manifest: {e}")))?;
        if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(Error::schema(format!(
                "manifest schema_version {} unsupported (expected {})",
                manifest.schema_version, MANIFEST_SCHEMA_VERSION
            )));
        }
        Ok(manifest)
    }

    pub fn kinds(&self) -> Result<Vec<ScenarioKind>> {
        if self.scenarios.is_empty() {
            return Ok(ScenarioKind::ALL.to_vec());
        }
        self.scenarios.iter().map(|s| s.parse()).collect()
    }
}
