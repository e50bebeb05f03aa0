mod common;

use std::collections::{BTreeSet, VecDeque};

use common::*;
use proptest::prelude::*;
use refground_core::geometry::OrientedBox;
use refground_core::scene::color::quantize;
use refground_core::scene::freespace::is_obstacle;
use refground_core::scene::ply::{parse_points_bytes, write_binary_le, PlyError};
use refground_core::scene::{
    dominant_colors, extract_free_space, load_scene, map_class, parse_points, ColoredPoint,
    FreeSpaceConfig, LabelMapping, Scene, SceneError, SceneObject, PALETTE,
};

#[test]
fn fixture_counts() {
    let minimal = load_scene(fixture("minimal.json")).unwrap();
    assert_eq!((minimal.objects.len(), minimal.regions.len()), (2, 1));
    assert_eq!(minimal.objects["chair_1"].class_nyu40, "chair");

    let apartment = load_scene(fixture("apartment.json")).unwrap();
    assert_eq!((apartment.objects.len(), apartment.regions.len()), (20, 3));
    let text = std::fs::read_to_string(fixture("apartment.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(
        doc["objects"].as_array().unwrap().len(),
        apartment.objects.len()
    );
    assert_eq!(
        doc["regions"].as_array().unwrap().len(),
        apartment.regions.len()
    );
}

#[test]
fn dangling_region_is_named() {
    let err = load_scene(fixture("dangling_region.json")).unwrap_err();
    assert!(
        matches!(err, SceneError::DanglingReference { ref id, .. } if id == "r9"),
        "{err}"
    );
    assert!(err.to_string().contains("r9"));
    assert!(matches!(
        load_scene(fixture("nope.json")),
        Err(SceneError::Io { .. })
    ));
}

#[test]
fn class_mapping() {
    let m = LabelMapping::shipped();
    assert_eq!(map_class("wall", m), "wall");
    assert_eq!(map_class("armchair", m), "chair");
    assert_eq!(map_class("  ArmChair ", m), "chair");
    assert_eq!(map_class("zzz-unknown-gadget", m), "otherprop");
    let text = include_str!("../data/label_map.tsv");
    for line in text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
    {
        let (raw, class) = line.split_once('\t').unwrap();
        assert_eq!(map_class(raw, m), class.trim(), "{raw}");
    }
}

fn points(spec: &[(&str, usize)]) -> Vec<ColoredPoint> {
    spec.iter()
        .flat_map(|&(name, n)| {
            let rgb = PALETTE.iter().find(|(p, _)| *p == name).unwrap().1;
            (0..n).map(move |i| ColoredPoint {
                position: [i as f64, 0.0, 0.0],
                color: rgb,
            })
        })
        .collect()
}

#[test]
fn dominant_color_examples() {
    assert_eq!(
        dominant_colors(&points(&[("red", 100)])).unwrap(),
        vec!["red"]
    );
    let mixed = points(&[("green", 10), ("blue", 30), ("red", 60)]);
    assert_eq!(
        dominant_colors(&mixed).unwrap(),
        vec!["red", "blue", "green"]
    );
    // Palette order decides ties: red is listed before blue.
    let red = PALETTE.iter().position(|(n, _)| *n == "red").unwrap();
    let blue = PALETTE.iter().position(|(n, _)| *n == "blue").unwrap();
    assert!(red < blue);
    assert_eq!(
        dominant_colors(&points(&[("blue", 50), ("red", 50)])).unwrap(),
        vec!["red", "blue"]
    );
    assert!(dominant_colors(&[]).is_err());
}

proptest! {
    #[test]
    fn dominant_colors_are_sorted_by_count(raw in prop::collection::vec(any::<[u8; 3]>(), 1..200)) {
        let pts: Vec<ColoredPoint> = raw.iter().map(|&color| ColoredPoint { position: [0.0; 3], color }).collect();
        let out = dominant_colors(&pts).unwrap();
        prop_assert!(!out.is_empty() && out.len() <= 3);
        let count = |name: &str| raw.iter().filter(|&&c| PALETTE[quantize(c)].0 == name).count();
        prop_assert!(out.windows(2).all(|w| count(&w[0]) >= count(&w[1])));
        let distinct: BTreeSet<usize> = raw.iter().map(|&c| quantize(c)).collect();
        prop_assert_eq!(out.len(), distinct.len().min(3));
    }
}

#[test]
fn ply_ascii_and_binary() {
    let ascii = parse_points(fixture("three_points.ply")).unwrap();
    assert_eq!(
        ascii,
        vec![
            ColoredPoint {
                position: [0.0, 0.0, 0.0],
                color: [255, 0, 0]
            },
            ColoredPoint {
                position: [1.5, -2.25, 0.5],
                color: [0, 0, 255]
            },
            ColoredPoint {
                position: [-0.125, 3.0, 1.0],
                color: [10, 200, 30]
            },
        ]
    );
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("three_points_le.ply");
    std::fs::write(&path, write_binary_le(&ascii)).unwrap();
    assert_eq!(parse_points(&path).unwrap(), ascii);
}

#[test]
fn ply_errors() {
    assert!(matches!(
        parse_points(fixture("truncated.ply")),
        Err(PlyError::Truncated {
            expected: 5,
            found: 3
        })
    ));
    let mut binary = write_binary_le(&points(&[("red", 4)]));
    binary.truncate(binary.len() - 5);
    assert!(matches!(
        parse_points_bytes(&binary),
        Err(PlyError::Truncated {
            expected: 4,
            found: 3
        })
    ));
    let big = String::from_utf8_lossy(&write_binary_le(&[]))
        .replace("binary_little_endian", "binary_big_endian");
    assert!(matches!(
        parse_points_bytes(big.as_bytes()),
        Err(PlyError::Unsupported(_))
    ));
    assert!(matches!(
        parse_points_bytes(b"not a ply"),
        Err(PlyError::Header(_))
    ));
}

#[test]
fn empty_region_is_one_free_space() {
    let r = region("r", 4.0);
    let spaces = extract_free_space(&r, &[], &FreeSpaceConfig::default());
    assert_eq!(spaces.len(), 1);
    assert!((spaces[0].area - 16.0).abs() <= 4.0 * 4.0 * 0.1 + 1e-9);

    let tiny = region("t", 0.4);
    assert!(extract_free_space(&tiny, &[], &FreeSpaceConfig::default()).is_empty());
    let flat = region("f", 0.0);
    assert!(extract_free_space(&flat, &[], &FreeSpaceConfig::default()).is_empty());
}

/// Occupancy from exact cell/footprint interval overlap for axis-aligned
/// obstacles, then 4-connected flood fill.
fn oracle_components(
    size: f64,
    cell: f64,
    obstacles: &[OrientedBox],
    min_area: f64,
) -> Vec<BTreeSet<[i32; 2]>> {
    let n = (size / cell).round() as i32;
    let occupied = |i: i32, j: i32| {
        let (x0, y0) = (i as f64 * cell, j as f64 * cell);
        obstacles.iter().any(|b| {
            let (c, s) = (b.center(), b.size());
            x0 < c[0] + s[0] / 2.0
                && c[0] - s[0] / 2.0 < x0 + cell
                && y0 < c[1] + s[1] / 2.0
                && c[1] - s[1] / 2.0 < y0 + cell
        })
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if occupied(i, j) || seen.contains(&[i, j]) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([[i, j]]);
            seen.insert([i, j]);
            while let Some([a, b]) = queue.pop_front() {
                comp.insert([a, b]);
                for [da, db] in [[1, 0], [-1, 0], [0, 1], [0, -1]] {
                    let (x, y) = (a + da, b + db);
                    if x >= 0 && y >= 0 && x < n && y < n && !occupied(x, y) && seen.insert([x, y])
                    {
                        queue.push_back([x, y]);
                    }
                }
            }
            if comp.len() as f64 * cell * cell + 1e-9 >= min_area {
                out.push(comp);
            }
        }
    }
    out
}

#[test]
fn wall_to_wall_strip_bisects_the_room() {
    let cfg = FreeSpaceConfig::default();
    let strip = object("shelf", "shelves", [2.0, 2.1, 0.5], [4.0, 0.3, 1.0], 0.0);
    let spaces = extract_free_space(&region("r", 4.0), &[&strip], &cfg);
    let expected = oracle_components(4.0, cfg.cell_size, &[strip.bbox], cfg.min_area);
    assert_eq!(expected.len(), 2);
    assert_eq!(spaces.len(), 2);
    let got: Vec<BTreeSet<[i32; 2]>> = spaces
        .iter()
        .map(|s| s.cells.iter().copied().collect())
        .collect();
    assert_eq!(got, expected);

    // Raised above agent height, the same strip no longer blocks.
    let high = object("shelf", "shelves", [2.0, 2.1, 2.0], [4.0, 0.3, 0.2], 0.0);
    assert!(!is_obstacle(&high, 0.0, &cfg));
    assert_eq!(
        extract_free_space(&region("r", 4.0), &[&high], &cfg).len(),
        1
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn free_cells_avoid_obstacles(seed in any::<u64>()) {
        let mut r = rng(seed);
        let objects: Vec<SceneObject> = random_region_objects(&mut r, 6, 4.0);
        let refs: Vec<&SceneObject> = objects.iter().collect();
        let cfg = FreeSpaceConfig::default();
        let spaces = extract_free_space(&region("r", 4.0), &refs, &cfg);
        let mut all = BTreeSet::new();
        for s in &spaces {
            prop_assert!(s.area + 1e-9 >= cfg.min_area);
            prop_assert!((s.area - s.cells.len() as f64 * 0.01).abs() < 1e-9);
            for c in &s.cells {
                prop_assert!(all.insert(*c), "cell {:?} in two spaces", c);
            }
            for p in s.cell_centers() {
                for o in refs.iter().filter(|o| is_obstacle(o, 0.0, &cfg)) {
                    prop_assert!(point_box_distance(&o.bbox, [p[0], p[1], o.bbox.center()[2]]) > 0.0);
                }
            }
        }
    }

    #[test]
    fn scenes_round_trip(seed in any::<u64>(), with_space in any::<bool>()) {
        let mut r = rng(seed);
        let objects = random_region_objects(&mut r, 8, 4.0);
        let doc = serde_json::json!({
            "scene_id": format!("s{seed}"),
            "source": "synthetic",
            "regions": [{"region_id": "r", "label": "room", "bounds": {"min": [0.0, 0.0, 0.0], "max": [4.0, 4.0, 3.0]}}],
            "objects": objects.iter().map(|o| serde_json::json!({
                "object_id": o.id,
                "raw_label": o.class_nyu40,
                "region_id": "r",
                "box": {"center": o.bbox.center(), "size": o.bbox.size(), "yaw": o.bbox.yaw()},
                "colors": o.colors,
            })).collect::<Vec<_>>(),
        });
        let mut scene = match Scene::from_json_str(&doc.to_string()) {
            Ok(s) => s,
            // Random placements can push a center past the bounds tolerance.
            Err(SceneError::OutOfBounds { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        if with_space {
            scene.annotate_free_space(&FreeSpaceConfig::default());
        }
        let text = scene.to_json_string();
        let back = Scene::from_json_str(&text).unwrap();
        prop_assert_eq!(&back, &scene);
        prop_assert_eq!(back.to_json_string(), text);
    }
}
