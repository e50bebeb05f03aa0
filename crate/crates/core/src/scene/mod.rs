//! Scene data model: regions, objects with yawed boxes, free spaces, and the
//! JSON interchange format.

pub mod classes;
pub mod color;
pub mod freespace;
pub mod ply;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::OrientedBox;
pub use classes::{map_class, ClassGroups, LabelMapping, FREE_SPACE_CLASS, NYU40};
pub use color::{dominant_colors, PALETTE};
pub use freespace::{extract_free_space, FreeSpaceConfig};
pub use ply::{parse_points, ColoredPoint};

/// Object centers may sit this far outside their region bounds.
pub const REGION_TOLERANCE: f64 = 0.5;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scene document at '{path}': {message}")]
    Malformed { path: String, message: String },
    #[error("missing required field at '{path}': {message}")]
    MissingField { path: String, message: String },
    #[error("{kind} '{id}' referenced by '{referenced_by}' does not exist")]
    DanglingReference {
        kind: &'static str,
        id: String,
        referenced_by: String,
    },
    #[error("duplicate {kind} id '{id}'")]
    DuplicateId { kind: &'static str, id: String },
    #[error("object '{object_id}': '{class}' is not an NYU40 class")]
    InvalidClass { object_id: String, class: String },
    #[error("object '{object_id}': invalid colors {colors:?}")]
    InvalidColors {
        object_id: String,
        colors: Vec<String>,
    },
    #[error("object '{object_id}' lies outside region '{region_id}'")]
    OutOfBounds {
        object_id: String,
        region_id: String,
    },
    #[error("region '{region_id}' has inverted bounds")]
    InvalidBounds { region_id: String },
    #[error("free space '{id}': {message}")]
    InvalidFreeSpace { id: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn contains_with_tolerance(&self, p: [f64; 3], tol: f64) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] - tol && p[i] <= self.max[i] + tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    pub id: String,
    pub raw_label: String,
    pub class_nyu40: String,
    pub bbox: OrientedBox,
    /// Dominant palette colors, most frequent first.
    pub colors: Vec<String>,
    pub region_id: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub id: String,
    pub label: String,
    pub bounds: Aabb,
    pub object_ids: Vec<String>,
    pub freespace_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeSpace {
    pub id: String,
    pub region_id: String,
    /// Grid origin (region floor corner) and cell edge length.
    pub origin: [f64; 2],
    pub cell_size: f64,
    /// Cells as `[column, row]`, sorted row-major.
    pub cells: Vec<[i32; 2]>,
    pub bbox: OrientedBox,
    pub area: f64,
}

impl FreeSpace {
    pub fn cell_centers(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.cells.iter().map(|c| {
            [
                self.origin[0] + (c[0] as f64 + 0.5) * self.cell_size,
                self.origin[1] + (c[1] as f64 + 0.5) * self.cell_size,
            ]
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub id: String,
    pub source: String,
    pub regions: Vec<Region>,
    pub objects: BTreeMap<String, SceneObject>,
    pub free_spaces: BTreeMap<String, FreeSpace>,
}

// Interchange documents.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    scene_id: String,
    source: String,
    regions: Vec<RegionDoc>,
    objects: Vec<ObjectDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    free_spaces: Vec<FreeSpaceDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionDoc {
    region_id: String,
    label: String,
    bounds: Aabb,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectDoc {
    object_id: String,
    raw_label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class_nyu40: Option<String>,
    region_id: String,
    #[serde(rename = "box")]
    bbox: OrientedBox,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    colors: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FreeSpaceDoc {
    free_space_id: String,
    region_id: String,
    origin: [f64; 2],
    cell_size: f64,
    cells: Vec<[i32; 2]>,
    #[serde(rename = "box")]
    bbox: OrientedBox,
    area: f64,
}

fn classify_serde_error(err: serde_path_to_error::Error<serde_json::Error>) -> SceneError {
    let path = err.path().to_string();
    let message = err.inner().to_string();
    if message.starts_with("missing field") {
        SceneError::MissingField { path, message }
    } else {
        SceneError::Malformed { path, message }
    }
}

impl Scene {
    pub fn from_json_str(text: &str) -> Result<Self, SceneError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: SceneDoc = serde_path_to_error::deserialize(de).map_err(classify_serde_error)?;
        Self::from_document(doc, LabelMapping::shipped())
    }

    fn from_document(doc: SceneDoc, mapping: &LabelMapping) -> Result<Self, SceneError> {
        let mut regions = Vec::with_capacity(doc.regions.len());
        let mut region_ids = BTreeSet::new();
        for r in doc.regions {
            if !region_ids.insert(r.region_id.clone()) {
                return Err(SceneError::DuplicateId {
                    kind: "region",
                    id: r.region_id,
                });
            }
            if (0..3).any(|i| r.bounds.min[i] > r.bounds.max[i]) {
                return Err(SceneError::InvalidBounds {
                    region_id: r.region_id,
                });
            }
            regions.push(Region {
                id: r.region_id,
                label: r.label,
                bounds: r.bounds,
                object_ids: Vec::new(),
                freespace_ids: Vec::new(),
            });
        }

        let mut objects = BTreeMap::new();
        for o in doc.objects {
            let class = match o.class_nyu40 {
                Some(c) if classes::is_nyu40(&c) => c,
                Some(c) => {
                    return Err(SceneError::InvalidClass {
                        object_id: o.object_id,
                        class: c,
                    })
                }
                None => map_class(&o.raw_label, mapping),
            };
            let colors = o.colors.unwrap_or_default();
            if colors.len() > color::MAX_COLORS
                || colors.iter().any(|c| !color::is_palette_color(c))
            {
                return Err(SceneError::InvalidColors {
                    object_id: o.object_id,
                    colors,
                });
            }
            let object = SceneObject {
                id: o.object_id.clone(),
                raw_label: o.raw_label,
                class_nyu40: class,
                bbox: o.bbox,
                colors,
                region_id: o.region_id,
            };
            if objects.insert(o.object_id.clone(), object).is_some() {
                return Err(SceneError::DuplicateId {
                    kind: "object",
                    id: o.object_id,
                });
            }
        }

        let mut free_spaces = BTreeMap::new();
        for f in doc.free_spaces {
            let space = FreeSpace {
                id: f.free_space_id.clone(),
                region_id: f.region_id,
                origin: f.origin,
                cell_size: f.cell_size,
                cells: f.cells,
                bbox: f.bbox,
                area: f.area,
            };
            if free_spaces.insert(f.free_space_id.clone(), space).is_some() {
                return Err(SceneError::DuplicateId {
                    kind: "free space",
                    id: f.free_space_id,
                });
            }
        }

        let mut scene = Scene {
            id: doc.scene_id,
            source: doc.source,
            regions,
            objects,
            free_spaces,
        };
        scene.link_regions()?;
        scene.validate()?;
        Ok(scene)
    }

    /// Rebuilds each region's object and free-space id lists from the
    /// back-references.
    fn link_regions(&mut self) -> Result<(), SceneError> {
        for region in &mut self.regions {
            region.object_ids.clear();
            region.freespace_ids.clear();
        }
        let index: BTreeMap<String, usize> = self
            .regions
            .iter()
            .enumerate()
            .map(|(i, r)| (r.id.clone(), i))
            .collect();
        for o in self.objects.values() {
            let &i = index
                .get(&o.region_id)
                .ok_or_else(|| SceneError::DanglingReference {
                    kind: "region",
                    id: o.region_id.clone(),
                    referenced_by: o.id.clone(),
                })?;
            self.regions[i].object_ids.push(o.id.clone());
        }
        for f in self.free_spaces.values() {
            let &i = index
                .get(&f.region_id)
                .ok_or_else(|| SceneError::DanglingReference {
                    kind: "region",
                    id: f.region_id.clone(),
                    referenced_by: f.id.clone(),
                })?;
            self.regions[i].freespace_ids.push(f.id.clone());
        }
        Ok(())
    }

    /// Checks every scene invariant.
    pub fn validate(&self) -> Result<(), SceneError> {
        let mut seen = BTreeSet::new();
        for region in &self.regions {
            if !seen.insert(region.id.as_str()) {
                return Err(SceneError::DuplicateId {
                    kind: "region",
                    id: region.id.clone(),
                });
            }
            for id in &region.object_ids {
                let object = self
                    .objects
                    .get(id)
                    .ok_or_else(|| SceneError::DanglingReference {
                        kind: "object",
                        id: id.clone(),
                        referenced_by: region.id.clone(),
                    })?;
                if !region
                    .bounds
                    .contains_with_tolerance(object.bbox.center(), REGION_TOLERANCE)
                {
                    return Err(SceneError::OutOfBounds {
                        object_id: id.clone(),
                        region_id: region.id.clone(),
                    });
                }
            }
            let mut claimed = BTreeSet::new();
            for id in &region.freespace_ids {
                let space =
                    self.free_spaces
                        .get(id)
                        .ok_or_else(|| SceneError::DanglingReference {
                            kind: "free space",
                            id: id.clone(),
                            referenced_by: region.id.clone(),
                        })?;
                if space.cells.is_empty() || space.cell_size.is_nan() || space.cell_size <= 0.0 {
                    return Err(SceneError::InvalidFreeSpace {
                        id: id.clone(),
                        message: "empty footprint or non-positive cell size".into(),
                    });
                }
                for cell in &space.cells {
                    if !claimed.insert(*cell) {
                        return Err(SceneError::InvalidFreeSpace {
                            id: id.clone(),
                            message: format!("cell {cell:?} shared with another free space"),
                        });
                    }
                }
            }
        }
        for object in self.objects.values() {
            if !seen.contains(object.region_id.as_str()) {
                return Err(SceneError::DanglingReference {
                    kind: "region",
                    id: object.region_id.clone(),
                    referenced_by: object.id.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        let doc = SceneDoc {
            scene_id: self.id.clone(),
            source: self.source.clone(),
            regions: self
                .regions
                .iter()
                .map(|r| RegionDoc {
                    region_id: r.id.clone(),
                    label: r.label.clone(),
                    bounds: r.bounds,
                })
                .collect(),
            objects: self
                .objects
                .values()
                .map(|o| ObjectDoc {
                    object_id: o.id.clone(),
                    raw_label: o.raw_label.clone(),
                    class_nyu40: Some(o.class_nyu40.clone()),
                    region_id: o.region_id.clone(),
                    bbox: o.bbox,
                    colors: Some(o.colors.clone()),
                })
                .collect(),
            free_spaces: self
                .free_spaces
                .values()
                .map(|f| FreeSpaceDoc {
                    free_space_id: f.id.clone(),
                    region_id: f.region_id.clone(),
                    origin: f.origin,
                    cell_size: f.cell_size,
                    cells: f.cells.clone(),
                    bbox: f.bbox,
                    area: f.area,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("scene documents always serialize")
    }

    pub fn region(&self, id: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.id == id)
    }

    pub fn objects_in(&self, region: &Region) -> Vec<&SceneObject> {
        region
            .object_ids
            .iter()
            .map(|id| &self.objects[id])
            .collect()
    }

    pub fn free_spaces_in(&self, region: &Region) -> Vec<&FreeSpace> {
        region
            .freespace_ids
            .iter()
            .map(|id| &self.free_spaces[id])
            .collect()
    }

    /// Replaces all free-space annotations with freshly extracted ones.
    pub fn annotate_free_space(&mut self, config: &FreeSpaceConfig) {
        let mut spaces = BTreeMap::new();
        for region in &self.regions {
            let objects = self.objects_in(region);
            for space in extract_free_space(region, &objects, config) {
                spaces.insert(space.id.clone(), space);
            }
        }
        self.free_spaces = spaces;
        self.link_regions()
            .expect("extracted spaces reference existing regions");
    }

    /// Sets an object's colors from its point samples.
    pub fn annotate_colors(
        &mut self,
        object_id: &str,
        points: &[ColoredPoint],
    ) -> Result<(), color::ColorError> {
        let colors = dominant_colors(points)?;
        if let Some(object) = self.objects.get_mut(object_id) {
            object.colors = colors;
        }
        Ok(())
    }
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene, SceneError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SceneError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scene::from_json_str(&text)
}
