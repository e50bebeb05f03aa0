//! Seeded synthetic apartments: rooms furnished from templates, with small
//! items resting on support surfaces and books shelved inside bookcases.

use std::path::{Path, PathBuf};

use anyhow::Result;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use refground_core::scene::{Scene, PALETTE};
use refground_core::seed;
use serde_json::{json, Value};

use crate::dataset::write_json;

const ROOM_WIDTH: f64 = 5.0;
const ROOM_DEPTH: f64 = 4.5;
const WALL_HEIGHT: f64 = 2.6;
const WALL_THICKNESS: f64 = 0.1;

#[derive(Clone, Copy)]
enum Placement {
    Floor,
    /// Resting on the top of the most recent floor item.
    OnLast,
    /// Inside the most recent floor item.
    InLast,
}

struct Item {
    raw: &'static str,
    size: [f64; 3],
    count: (usize, usize),
    placement: Placement,
}

const fn item(
    raw: &'static str,
    size: [f64; 3],
    count: (usize, usize),
    placement: Placement,
) -> Item {
    Item {
        raw,
        size,
        count,
        placement,
    }
}

use Placement::{Floor, InLast, OnLast};

const LIVING: &[Item] = &[
    item("couch", [2.0, 0.9, 0.8], (1, 1), Floor),
    item("coffee table", [1.0, 0.6, 0.45], (1, 1), Floor),
    item("cup", [0.08, 0.08, 0.1], (0, 1), OnLast),
    item("vase", [0.15, 0.15, 0.3], (0, 1), OnLast),
    item("armchair", [0.8, 0.8, 0.9], (1, 2), Floor),
    item("tv stand", [1.4, 0.4, 0.5], (1, 1), Floor),
    item("tv", [1.0, 0.1, 0.6], (1, 1), OnLast),
    item("bookcase", [0.9, 0.35, 1.8], (0, 1), Floor),
    item("book", [0.2, 0.15, 0.25], (1, 2), InLast),
    item("floor lamp", [0.35, 0.35, 1.6], (0, 1), Floor),
    item("plant", [0.4, 0.4, 0.8], (0, 2), Floor),
];

const KITCHEN: &[Item] = &[
    item("kitchen counter", [2.0, 0.6, 0.9], (1, 1), Floor),
    item("microwave", [0.5, 0.35, 0.3], (0, 1), OnLast),
    item("bottle", [0.08, 0.08, 0.3], (0, 2), OnLast),
    item("fridge", [0.8, 0.7, 1.8], (1, 1), Floor),
    item("kitchen table", [1.2, 0.8, 0.75], (1, 1), Floor),
    item("mug", [0.09, 0.09, 0.1], (0, 1), OnLast),
    item("dining chair", [0.45, 0.45, 0.9], (2, 3), Floor),
    item("trash can", [0.35, 0.35, 0.6], (0, 1), Floor),
    item("stove", [0.7, 0.6, 0.9], (0, 1), Floor),
];

const BEDROOM: &[Item] = &[
    item("bed", [2.0, 1.6, 0.6], (1, 1), Floor),
    item("pillow", [0.6, 0.4, 0.15], (1, 2), OnLast),
    item("nightstand", [0.5, 0.45, 0.55], (1, 2), Floor),
    item("table lamp", [0.25, 0.25, 0.45], (0, 1), OnLast),
    item("dresser", [1.2, 0.5, 0.9], (0, 1), Floor),
    item("wardrobe", [1.2, 0.6, 2.0], (0, 1), Floor),
    item("chair", [0.5, 0.5, 0.9], (0, 1), Floor),
    item("backpack", [0.35, 0.25, 0.5], (0, 1), Floor),
];

const OFFICE: &[Item] = &[
    item("writing desk", [1.4, 0.7, 0.75], (1, 1), Floor),
    item("laptop", [0.35, 0.25, 0.03], (0, 1), OnLast),
    item("desk lamp", [0.2, 0.2, 0.45], (0, 1), OnLast),
    item("office chair", [0.6, 0.6, 1.0], (1, 1), Floor),
    item("file cabinet", [0.5, 0.6, 0.7], (0, 1), Floor),
    item("bookshelf", [0.9, 0.35, 1.8], (0, 1), Floor),
    item("books", [0.3, 0.2, 0.25], (0, 1), InLast),
    item("box", [0.5, 0.4, 0.35], (0, 2), Floor),
];

const BATHROOM: &[Item] = &[
    item("toilet", [0.4, 0.7, 0.8], (1, 1), Floor),
    item("sink", [0.6, 0.5, 0.85], (1, 1), Floor),
    item("bottle", [0.07, 0.07, 0.2], (0, 1), OnLast),
    item("tub", [1.7, 0.8, 0.6], (0, 1), Floor),
    item("towel", [0.5, 0.1, 0.8], (0, 1), Floor),
    item("trash can", [0.3, 0.3, 0.4], (0, 1), Floor),
];

const ROOMS: [(&str, &[Item]); 5] = [
    ("living room", LIVING),
    ("kitchen", KITCHEN),
    ("bedroom", BEDROOM),
    ("office", OFFICE),
    ("bathroom", BATHROOM),
];

struct Placed {
    center: [f64; 3],
    size: [f64; 3],
    yaw: f64,
}

impl Placed {
    /// Axis-aligned footprint bounds, grown by `margin`.
    fn bounds(&self, margin: f64) -> ([f64; 2], [f64; 2]) {
        let (s, c) = self.yaw.sin_cos();
        let hx = 0.5 * (self.size[0] * c.abs() + self.size[1] * s.abs()) + margin;
        let hy = 0.5 * (self.size[0] * s.abs() + self.size[1] * c.abs()) + margin;
        (
            [self.center[0] - hx, self.center[1] - hy],
            [self.center[0] + hx, self.center[1] + hy],
        )
    }
}

fn jittered(r: &mut ChaCha8Rng, size: [f64; 3]) -> [f64; 3] {
    size.map(|s| s * r.gen_range(0.85..1.15))
}

fn colors(r: &mut ChaCha8Rng) -> Vec<String> {
    let mut names: Vec<&str> = PALETTE.iter().map(|(n, _)| *n).collect();
    names.shuffle(r);
    let n = [1, 1, 2, 3][r.gen_range(0..4)];
    names[..n].iter().map(|s| s.to_string()).collect()
}

fn floor_spot(
    r: &mut ChaCha8Rng,
    size: [f64; 3],
    origin: [f64; 2],
    floor: &[Placed],
) -> Option<Placed> {
    for _ in 0..60 {
        let yaw = if r.gen_bool(0.7) {
            [0.0, std::f64::consts::FRAC_PI_2][r.gen_range(0..2)] + r.gen_range(-0.05..0.05)
        } else {
            r.gen_range(-std::f64::consts::PI..std::f64::consts::PI)
        };
        let center = [
            origin[0] + r.gen_range(0.5..ROOM_WIDTH - 0.5),
            origin[1] + r.gen_range(0.5..ROOM_DEPTH - 0.5),
            size[2] / 2.0,
        ];
        let p = Placed { center, size, yaw };
        let (lo, hi) = p.bounds(0.0);
        let inside = lo[0] >= origin[0] + WALL_THICKNESS
            && lo[1] >= origin[1] + WALL_THICKNESS
            && hi[0] <= origin[0] + ROOM_WIDTH - WALL_THICKNESS
            && hi[1] <= origin[1] + ROOM_DEPTH - WALL_THICKNESS;
        let clear = floor.iter().all(|q| {
            let (a, b) = q.bounds(0.15);
            hi[0] < a[0] || b[0] < lo[0] || hi[1] < a[1] || b[1] < lo[1]
        });
        if inside && clear {
            return Some(p);
        }
    }
    None
}

/// A small item on top of `support`, fully within its footprint.
fn on_top(r: &mut ChaCha8Rng, size: [f64; 3], support: &Placed) -> Option<Placed> {
    let room = [support.size[0] - size[0], support.size[1] - size[1]];
    if room[0] <= 0.0 || room[1] <= 0.0 {
        return None;
    }
    let local = [
        r.gen_range(-0.45..0.45) * room[0],
        r.gen_range(-0.45..0.45) * room[1],
    ];
    let (s, c) = support.yaw.sin_cos();
    Some(Placed {
        center: [
            support.center[0] + c * local[0] - s * local[1],
            support.center[1] + s * local[0] + c * local[1],
            support.center[2] + support.size[2] / 2.0 + size[2] / 2.0,
        ],
        size,
        yaw: support.yaw,
    })
}

/// An item nested inside `container`, shrunk to fit if needed.
fn inside(r: &mut ChaCha8Rng, size: [f64; 3], container: &Placed) -> Placed {
    let size: [f64; 3] = std::array::from_fn(|i| size[i].min(0.8 * container.size[i]));
    let dz = r.gen_range(-0.3..0.3) * (container.size[2] - size[2]);
    Placed {
        center: [
            container.center[0],
            container.center[1],
            container.center[2] + dz,
        ],
        size,
        yaw: container.yaw,
    }
}

fn box_json(p: &Placed) -> Value {
    json!({ "center": p.center, "size": p.size, "yaw": p.yaw })
}

/// The scene document for synthetic scene `index`.
pub fn synthesize_document(index: usize, base_seed: u64) -> Value {
    let scene_id = format!("synth_{index:02}");
    let mut r = seed::rng(seed::derive(base_seed, &["synth", &scene_id]));
    let room_count = r.gen_range(2..=3);
    let mut kinds: Vec<usize> = (0..ROOMS.len()).collect();
    kinds.shuffle(&mut r);

    let mut regions = Vec::new();
    let mut objects = Vec::new();
    let mut counters = std::collections::BTreeMap::<String, usize>::new();
    let mut next_id = |raw: &str| {
        let key = raw.replace(' ', "_");
        let n = counters.entry(key.clone()).or_default();
        *n += 1;
        format!("{key}_{n}")
    };
    for (k, &kind) in kinds[..room_count].iter().enumerate() {
        let (label, items) = ROOMS[kind];
        let region_id = format!("r{k}");
        let origin = [k as f64 * ROOM_WIDTH, 0.0];
        regions.push(json!({
            "region_id": region_id,
            "label": label,
            "bounds": {"min": [origin[0], origin[1], 0.0], "max": [origin[0] + ROOM_WIDTH, origin[1] + ROOM_DEPTH, WALL_HEIGHT]},
        }));
        let t = WALL_THICKNESS;
        let walls = [
            (
                [origin[0] + ROOM_WIDTH / 2.0, origin[1] + t / 2.0],
                [ROOM_WIDTH, t],
            ),
            (
                [
                    origin[0] + ROOM_WIDTH / 2.0,
                    origin[1] + ROOM_DEPTH - t / 2.0,
                ],
                [ROOM_WIDTH, t],
            ),
            (
                [origin[0] + t / 2.0, origin[1] + ROOM_DEPTH / 2.0],
                [t, ROOM_DEPTH],
            ),
            (
                [
                    origin[0] + ROOM_WIDTH - t / 2.0,
                    origin[1] + ROOM_DEPTH / 2.0,
                ],
                [t, ROOM_DEPTH],
            ),
        ];
        for (c, s) in walls {
            let color = ["white", "gray"][r.gen_range(0..2)];
            objects.push(json!({
                "object_id": next_id("wall"),
                "raw_label": "wall",
                "region_id": region_id,
                "box": {"center": [c[0], c[1], WALL_HEIGHT / 2.0], "size": [s[0], s[1], WALL_HEIGHT], "yaw": 0.0},
                "colors": [color],
            }));
        }

        let mut floor: Vec<Placed> = Vec::new();
        let mut last_floor: Option<usize> = None;
        for it in items {
            if matches!(it.placement, Floor) {
                last_floor = None;
            }
            let count = r.gen_range(it.count.0..=it.count.1);
            for _ in 0..count {
                let size = jittered(&mut r, it.size);
                let placed = match it.placement {
                    Floor => floor_spot(&mut r, size, origin, &floor),
                    OnLast => last_floor.and_then(|i| on_top(&mut r, size, &floor[i])),
                    InLast => last_floor.map(|i| inside(&mut r, size, &floor[i])),
                };
                let Some(p) = placed else { continue };
                objects.push(json!({
                    "object_id": next_id(it.raw),
                    "raw_label": it.raw,
                    "region_id": region_id,
                    "box": box_json(&p),
                    "colors": colors(&mut r),
                }));
                if matches!(it.placement, Floor) {
                    floor.push(p);
                    last_floor = Some(floor.len() - 1);
                }
            }
        }
    }
    json!({
        "scene_id": scene_id,
        "source": "synthetic",
        "regions": regions,
        "objects": objects,
    })
}

/// Synthetic scene `index`, validated.
pub fn synthesize_scene(index: usize, base_seed: u64) -> Scene {
    Scene::from_json_str(&synthesize_document(index, base_seed).to_string())
        .expect("synthetic scenes satisfy the scene invariants")
}

/// Writes scenes `0..count` as `<out>/synth_NN.json`.
pub fn cmd_synthesize(count: usize, base_seed: u64, out: &Path) -> Result<Vec<PathBuf>> {
    (0..count)
        .map(|i| {
            let doc = synthesize_document(i, base_seed);
            let path = out.join(format!(
                "{}.json",
                doc["scene_id"].as_str().expect("scene id")
            ));
            write_json(&path, &doc)?;
            Ok(path)
        })
        .collect()
}
