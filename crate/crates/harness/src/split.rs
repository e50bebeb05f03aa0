//! Seeded scene-level partitions (train/validation and the like).

use std::path::Path;

use anyhow::{bail, Result};
use rand::seq::SliceRandom;
use refground_core::seed;
use serde::{Deserialize, Serialize};

use crate::dataset::{read_json, write_json, Manifest, MANIFEST};
use crate::generate::scene_files;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPart {
    pub name: String,
    pub ratio: f64,
    pub scenes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub seed: u64,
    pub parts: Vec<SplitPart>,
}

pub fn parse_ratios(text: &str) -> Result<Vec<f64>> {
    let ratios = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()?;
    validate_ratios(&ratios)?;
    Ok(ratios)
}

fn validate_ratios(ratios: &[f64]) -> Result<()> {
    if ratios.len() < 2 {
        bail!("need at least two ratios");
    }
    if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        bail!("ratios must be positive");
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        bail!("ratios must sum to 1, got {sum}");
    }
    Ok(())
}

/// Part sizes for `n` items: floors of the quotas, then the leftover items
/// to the largest fractional remainders (earlier parts win ties). A part
/// that would be empty takes one item from the largest part.
pub fn part_sizes(n: usize, ratios: &[f64]) -> Result<Vec<usize>> {
    validate_ratios(ratios)?;
    if n < ratios.len() {
        bail!("{n} scenes cannot fill {} parts", ratios.len());
    }
    let quotas: Vec<f64> = ratios.iter().map(|r| r * n as f64).collect();
    let mut sizes: Vec<usize> = quotas.iter().map(|q| (q + 1e-9).floor() as usize).collect();
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - sizes[a] as f64;
        let fb = quotas[b] - sizes[b] as f64;
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let mut left = n - sizes.iter().sum::<usize>().min(n);
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        sizes[i] += 1;
        left -= 1;
    }
    while let Some(empty) = sizes.iter().position(|&s| s == 0) {
        let largest = (0..sizes.len())
            .max_by_key(|&i| (sizes[i], std::cmp::Reverse(i)))
            .expect("nonempty");
        sizes[largest] -= 1;
        sizes[empty] += 1;
    }
    Ok(sizes)
}

pub fn default_names(parts: usize) -> Vec<String> {
    match parts {
        2 => vec!["train".into(), "validation".into()],
        3 => vec!["train".into(), "validation".into(), "test".into()],
        _ => (0..parts).map(|i| format!("part{i}")).collect(),
    }
}

/// Deterministic partition of `scenes`: ids are sorted, shuffled with the
/// seed and cut into consecutive parts; each part is listed sorted.
pub fn split_scenes(scenes: &[String], ratios: &[f64], base_seed: u64) -> Result<SplitManifest> {
    let mut ids = scenes.to_vec();
    ids.sort();
    ids.dedup();
    let sizes = part_sizes(ids.len(), ratios)?;
    ids.shuffle(&mut seed::rng(seed::derive(base_seed, &["split"])));
    let mut rest = ids.as_slice();
    let parts = default_names(ratios.len())
        .into_iter()
        .zip(ratios)
        .zip(sizes)
        .map(|((name, &ratio), size)| {
            let (head, tail) = rest.split_at(size);
            rest = tail;
            let mut scenes = head.to_vec();
            scenes.sort();
            SplitPart {
                name,
                ratio,
                scenes,
            }
        })
        .collect();
    Ok(SplitManifest {
        seed: base_seed,
        parts,
    })
}

/// Scene ids from a dataset directory (its manifest) or from the stems of
/// the scene files under a directory.
pub fn list_scenes(path: &Path) -> Result<Vec<String>> {
    if path.join(MANIFEST).is_file() {
        let manifest: Manifest = read_json(&path.join(MANIFEST))?;
        return Ok(manifest.scenes.into_iter().map(|s| s.scene_id).collect());
    }
    Ok(scene_files(path)?
        .iter()
        .filter_map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .collect())
}

pub fn cmd_split(
    scenes: &Path,
    ratios: &[f64],
    base_seed: u64,
    out: &Path,
) -> Result<SplitManifest> {
    let manifest = split_scenes(&list_scenes(scenes)?, ratios, base_seed)?;
    write_json(out, &manifest)?;
    Ok(manifest)
}
