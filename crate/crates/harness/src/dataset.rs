//! On-disk dataset layout shared by generation, benchmarking and serving.
//!
//! ```text
//! <dir>/manifest.json                      config, seed, scenes and regions
//! <dir>/summary.json                       counts per relation type and statement kind
//! <dir>/graphs/<scene>/<region>.json       graph documents
//! <dir>/statements/<scene>.jsonl           one statement record per line
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use refground_core::graph::SceneGraph;
use refground_core::language::StatementRecord;
use serde::{Deserialize, Serialize};

use crate::config::Config;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestScene {
    pub scene_id: String,
    pub regions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub seed: u64,
    pub config_hash: String,
    pub config: Config,
    pub scenes: Vec<ManifestScene>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub scenes: usize,
    pub regions: usize,
    pub objects: usize,
    pub free_spaces: usize,
    pub relation_counts: BTreeMap<String, usize>,
    pub perfect: usize,
    pub imperfect: usize,
    /// Eligible targets with no unambiguous descriptor.
    pub skipped_targets: usize,
    /// Imperfect statements requested but not produced.
    pub imperfect_shortfall: usize,
    pub failed_scenes: Vec<String>,
}

pub const MANIFEST: &str = "manifest.json";
pub const SUMMARY: &str = "summary.json";
pub const GRAPHS: &str = "graphs";
pub const STATEMENTS: &str = "statements";

pub fn graph_path(dir: &Path, scene_id: &str, region_id: &str) -> PathBuf {
    dir.join(GRAPHS)
        .join(scene_id)
        .join(format!("{region_id}.json"))
}

pub fn statements_path(dir: &Path, scene_id: &str) -> PathBuf {
    dir.join(STATEMENTS).join(format!("{scene_id}.jsonl"))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn statements_to_jsonl(records: &[StatementRecord]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
        .collect()
}

pub fn read_statements(path: &Path) -> Result<Vec<StatementRecord>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).with_context(|| format!("{}: line {}", path.display(), i + 1))
        })
        .collect()
}

/// A generated dataset loaded into memory.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: Manifest,
    /// Keyed by (scene id, region id).
    pub graphs: BTreeMap<(String, String), SceneGraph>,
    /// Per scene, in file order.
    pub statements: BTreeMap<String, Vec<StatementRecord>>,
}

impl Dataset {
    pub fn load(dir: &Path) -> Result<Self> {
        if !dir.join(MANIFEST).is_file() {
            bail!(
                "{} is not a dataset directory (no {MANIFEST})",
                dir.display()
            );
        }
        let manifest: Manifest = read_json(&dir.join(MANIFEST))?;
        let mut graphs = BTreeMap::new();
        let mut statements = BTreeMap::new();
        for scene in &manifest.scenes {
            for region in &scene.regions {
                let path = graph_path(dir, &scene.scene_id, region);
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let graph = SceneGraph::from_json_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
                graphs.insert((scene.scene_id.clone(), region.clone()), graph);
            }
            let records = read_statements(&statements_path(dir, &scene.scene_id))?;
            for r in &records {
                if !graphs.contains_key(&(scene.scene_id.clone(), r.region_id.clone())) {
                    bail!(
                        "statement '{}' names unknown region '{}'",
                        r.text,
                        r.region_id
                    );
                }
            }
            statements.insert(scene.scene_id.clone(), records);
        }
        Ok(Dataset {
            manifest,
            graphs,
            statements,
        })
    }

    pub fn graph(&self, scene_id: &str, region_id: &str) -> Option<&SceneGraph> {
        self.graphs
            .get(&(scene_id.to_string(), region_id.to_string()))
    }
}
