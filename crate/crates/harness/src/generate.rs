//! Dataset generation: scenes to graphs, perfect statements and their
//! perturbed (imperfect) counterparts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use refground_core::graph::scene_graphs;
use refground_core::graph::SceneGraph;
use refground_core::language::{
    generate_statements, perturb_statement, StatementRecord, SynonymTable,
};
use refground_core::relations::RelationType;
use refground_core::scene::{load_scene, Scene};
use refground_core::seed;

use crate::config::Config;
use crate::dataset::{
    graph_path, statements_path, statements_to_jsonl, write_json, write_text, Manifest,
    ManifestScene, Summary, GRAPHS, MANIFEST, STATEMENTS, SUMMARY,
};

/// Scene files under `path` (`*.json`, sorted), or `path` itself if it is
/// a file.
pub fn scene_files(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .with_context(|| format!("listing {}", path.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

pub struct SceneOutput {
    pub scene_id: String,
    pub graphs: Vec<SceneGraph>,
    pub records: Vec<StatementRecord>,
    pub objects: usize,
    pub free_spaces: usize,
    pub skipped: usize,
    pub shortfall: usize,
}

/// Graphs and statements for one scene. Imperfect statements number
/// ⌊ratio · perfect⌋, drawn from the perfect ones in seeded order as long
/// as perturbations succeed.
pub fn process_scene(mut scene: Scene, config: &Config, base_seed: u64) -> SceneOutput {
    scene.annotate_free_space(&config.free_space);
    let graphs = scene_graphs(&scene, &config.relations);
    let synonyms = SynonymTable::default();
    let scene_seed = seed::derive(base_seed, &[&scene.id]);

    let mut perfect = Vec::new();
    let mut skipped = 0;
    for g in &graphs {
        let out = generate_statements(g, &config.language, &synonyms, scene_seed);
        perfect.extend(out.records);
        skipped += out.skipped;
    }

    let wanted = (config.dataset.imperfect_ratio * perfect.len() as f64 + 1e-9).floor() as usize;
    let by_region: BTreeMap<&str, &SceneGraph> =
        graphs.iter().map(|g| (g.region_id(), g)).collect();
    let mut order: Vec<usize> = (0..perfect.len()).collect();
    order.shuffle(&mut seed::rng(seed::derive(
        base_seed,
        &[&scene.id, "imperfect"],
    )));
    let mut imperfect = Vec::new();
    for i in order {
        if imperfect.len() >= wanted {
            break;
        }
        let record = &perfect[i];
        if let Some(p) = perturb_statement(
            record,
            by_region[record.region_id.as_str()],
            &config.language,
            &synonyms,
        ) {
            imperfect.push(p);
        }
    }
    let shortfall = wanted - imperfect.len();
    if shortfall > 0 {
        log::info!(
            "scene {}: {shortfall} imperfect statements could not be produced",
            scene.id
        );
    }

    let mut records = perfect;
    records.extend(imperfect);
    SceneOutput {
        scene_id: scene.id.clone(),
        objects: scene.objects.len(),
        free_spaces: scene.free_spaces.len(),
        graphs,
        records,
        skipped,
        shortfall,
    }
}

/// Relation counts per type over the given graphs, every type listed.
pub fn relation_counts<'a>(
    graphs: impl IntoIterator<Item = &'a SceneGraph>,
) -> BTreeMap<String, usize> {
    let mut counts: BTreeMap<String, usize> = RelationType::ALL
        .iter()
        .map(|k| (k.name().to_string(), 0))
        .collect();
    for g in graphs {
        for e in g.edges() {
            *counts.get_mut(e.kind.name()).expect("all types listed") += 1;
        }
    }
    counts
}

/// Generates a dataset from scene files into `out`. Scenes that fail to
/// load are logged and skipped; it is an error if none succeed.
pub fn cmd_generate(
    scene_paths: &[PathBuf],
    config: &Config,
    base_seed: u64,
    out: &Path,
) -> Result<Summary> {
    config.validate()?;
    let loaded: Vec<(PathBuf, Result<Scene>)> = scene_paths
        .par_iter()
        .map(|p| (p.clone(), load_scene(p).map_err(anyhow::Error::from)))
        .collect();

    let mut failed = Vec::new();
    let mut scenes: BTreeMap<String, Scene> = BTreeMap::new();
    for (path, result) in loaded {
        match result {
            Ok(scene) if scenes.contains_key(&scene.id) => {
                log::error!(
                    "{}: duplicate scene id '{}', skipped",
                    path.display(),
                    scene.id
                );
                failed.push(path.display().to_string());
            }
            Ok(scene) => {
                scenes.insert(scene.id.clone(), scene);
            }
            Err(e) => {
                log::error!("{}: {e:#}, skipped", path.display());
                failed.push(path.display().to_string());
            }
        }
    }
    if scenes.is_empty() {
        bail!("no scene could be loaded ({} failed)", failed.len());
    }

    let outputs: Vec<SceneOutput> = scenes
        .into_par_iter()
        .map(|(_, scene)| process_scene(scene, config, base_seed))
        .collect();

    for stale in [GRAPHS, STATEMENTS] {
        let dir = out.join(stale);
        if dir.exists() {
            std::fs::remove_dir_all(&dir).with_context(|| format!("clearing {}", dir.display()))?;
        }
    }
    let mut summary = Summary {
        scenes: outputs.len(),
        relation_counts: relation_counts(outputs.iter().flat_map(|o| &o.graphs)),
        failed_scenes: failed,
        ..Summary::default()
    };
    let mut manifest_scenes = Vec::new();
    for o in &outputs {
        for g in &o.graphs {
            let mut text = g.to_json_string();
            text.push('\n');
            write_text(&graph_path(out, &o.scene_id, g.region_id()), &text)?;
        }
        write_text(
            &statements_path(out, &o.scene_id),
            &statements_to_jsonl(&o.records),
        )?;
        manifest_scenes.push(ManifestScene {
            scene_id: o.scene_id.clone(),
            regions: o.graphs.iter().map(|g| g.region_id().to_string()).collect(),
        });
        summary.regions += o.graphs.len();
        summary.objects += o.objects;
        summary.free_spaces += o.free_spaces;
        summary.perfect += o.records.iter().filter(|r| !r.is_imperfect).count();
        summary.imperfect += o.records.iter().filter(|r| r.is_imperfect).count();
        summary.skipped_targets += o.skipped;
        summary.imperfect_shortfall += o.shortfall;
    }
    let manifest = Manifest {
        seed: base_seed,
        config_hash: config.hash(),
        config: config.clone(),
        scenes: manifest_scenes,
    };
    write_json(&out.join(MANIFEST), &manifest)?;
    write_json(&out.join(SUMMARY), &summary)?;
    Ok(summary)
}
