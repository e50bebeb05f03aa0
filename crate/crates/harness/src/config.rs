//! Run configuration, read from TOML. Every section is optional and falls
//! back to the library defaults.

use std::path::Path;

use anyhow::{bail, Context, Result};
use refground_core::grounding::AspectWeights;
use refground_core::language::LanguageConfig;
use refground_core::relations::RelationConfig;
use refground_core::scene::FreeSpaceConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    /// Imperfect statements per perfect statement, per scene.
    pub imperfect_ratio: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            imperfect_ratio: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub relations: RelationConfig,
    pub free_space: FreeSpaceConfig,
    pub language: LanguageConfig,
    pub scoring: AspectWeights,
    pub dataset: DatasetConfig,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Config::from_toml_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        self.relations.validate()?;
        self.scoring.validate()?;
        let fs = &self.free_space;
        if !(fs.cell_size > 0.0 && fs.agent_height > 0.0 && fs.min_area >= 0.0) {
            bail!("free_space: cell_size and agent_height must be positive, min_area non-negative");
        }
        let ratio = self.dataset.imperfect_ratio;
        if !(ratio.is_finite() && ratio >= 0.0) {
            bail!("dataset.imperfect_ratio must be a non-negative number, got {ratio}");
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
