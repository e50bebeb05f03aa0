//! Seeded generators and independent oracles shared by the integration
//! tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use refground_core::geometry::OrientedBox;
use refground_core::graph::{Node, NodeKind, SceneGraph, SizeLabel};
use refground_core::query::{Attribute, QueryNode, QueryRelation, SubgraphQuery};
use refground_core::relations::{
    eval_between, eval_binary, Relation, RelationConfig, RelationType,
};
use refground_core::scene::{Aabb, Region, SceneObject};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn region(id: &str, size: f64) -> Region {
    Region {
        id: id.into(),
        label: "room".into(),
        bounds: Aabb {
            min: [0.0, 0.0, 0.0],
            max: [size, size, 3.0],
        },
        object_ids: vec![],
        freespace_ids: vec![],
    }
}

pub fn object(id: &str, class: &str, center: [f64; 3], size: [f64; 3], yaw: f64) -> SceneObject {
    SceneObject {
        id: id.into(),
        raw_label: class.into(),
        class_nyu40: class.into(),
        bbox: OrientedBox::new(center, size, yaw).unwrap(),
        colors: vec!["gray".into()],
        region_id: "r".into(),
    }
}

pub fn random_box(r: &mut ChaCha8Rng, extent: f64) -> OrientedBox {
    let size = [
        r.gen_range(0.1..1.5),
        r.gen_range(0.1..1.5),
        r.gen_range(0.1..1.5),
    ];
    let center = [
        r.gen_range(0.0..extent),
        r.gen_range(0.0..extent),
        r.gen_range(0.0..2.0),
    ];
    OrientedBox::new(center, size, r.gen_range(-PI..PI)).unwrap()
}

/// A box placed relative to `anchor` so that contact, stacking, nesting
/// and adjacency all occur often.
pub fn related_box(r: &mut ChaCha8Rng, anchor: &OrientedBox) -> OrientedBox {
    let a = anchor.center();
    let s = anchor.size();
    let yaw = r.gen_range(-PI..PI);
    match r.gen_range(0..4) {
        0 => {
            let size = [
                r.gen_range(0.05..1.0),
                r.gen_range(0.05..1.0),
                r.gen_range(0.05..0.6),
            ];
            let gap = r.gen_range(-0.1..0.3);
            let c = [
                a[0] + r.gen_range(-0.6..0.6) * s[0],
                a[1] + r.gen_range(-0.6..0.6) * s[1],
                anchor.z_max() + gap + size[2] / 2.0,
            ];
            OrientedBox::new(c, size, yaw).unwrap()
        }
        1 => {
            let f = r.gen_range(0.2..0.9);
            let size = [s[0] * f, s[1] * f, s[2] * f];
            let c = [
                a[0] + r.gen_range(-0.15..0.15) * s[0],
                a[1] + r.gen_range(-0.15..0.15) * s[1],
                a[2] + r.gen_range(-0.15..0.15) * s[2],
            ];
            OrientedBox::new(c, size, anchor.yaw() + r.gen_range(-0.2..0.2)).unwrap()
        }
        _ => {
            let size = [
                r.gen_range(0.1..1.2),
                r.gen_range(0.1..1.2),
                r.gen_range(0.1..1.2),
            ];
            let d = r.gen_range(0.0..2.5);
            let ang: f64 = r.gen_range(0.0..TAU);
            let c = [
                a[0] + d * ang.cos(),
                a[1] + d * ang.sin(),
                a[2] + r.gen_range(-0.5..0.5),
            ];
            OrientedBox::new(c, size, yaw).unwrap()
        }
    }
}

// Independent geometry: boxes handled in their own local frames.

fn local(b: &OrientedBox, p: [f64; 3]) -> [f64; 3] {
    let c = b.center();
    let (sin, cos) = b.yaw().sin_cos();
    let d = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
    [cos * d[0] + sin * d[1], -sin * d[0] + cos * d[1], d[2]]
}

fn world(b: &OrientedBox, q: [f64; 3]) -> [f64; 3] {
    let c = b.center();
    let (sin, cos) = b.yaw().sin_cos();
    [
        c[0] + cos * q[0] - sin * q[1],
        c[1] + sin * q[0] + cos * q[1],
        c[2] + q[2],
    ]
}

fn inside(b: &OrientedBox, p: [f64; 3]) -> bool {
    let q = local(b, p);
    let h = b.size();
    (0..3).all(|i| q[i].abs() <= h[i] / 2.0)
}

fn inside_footprint(b: &OrientedBox, p: [f64; 3]) -> bool {
    let q = local(b, p);
    let h = b.size();
    q[0].abs() <= h[0] / 2.0 && q[1].abs() <= h[1] / 2.0
}

/// Exact distance from a point to a solid box by clamping in local frame.
pub fn point_box_distance(b: &OrientedBox, p: [f64; 3]) -> f64 {
    let q = local(b, p);
    let h = b.size();
    (0..3)
        .map(|i| (q[i].abs() - h[i] / 2.0).max(0.0).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Surface samples on a regular grid over every face.
pub fn surface_samples(b: &OrientedBox, n: usize) -> Vec<[f64; 3]> {
    let h = b.size().map(|s| s / 2.0);
    let mut out = Vec::new();
    let t = |k: usize| -1.0 + 2.0 * k as f64 / (n - 1) as f64;
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for sign in [-1.0, 1.0] {
            for i in 0..n {
                for j in 0..n {
                    let mut q = [0.0; 3];
                    q[axis] = sign * h[axis];
                    q[u] = t(i) * h[u];
                    q[v] = t(j) * h[v];
                    out.push(world(b, q));
                }
            }
        }
    }
    out
}

pub fn sampled_gap(a: &OrientedBox, b: &OrientedBox) -> f64 {
    if surface_samples(a, 12).iter().any(|&p| inside(b, p))
        || surface_samples(b, 12).iter().any(|&p| inside(a, p))
    {
        return 0.0;
    }
    surface_samples(a, 40)
        .into_iter()
        .map(|p| point_box_distance(b, p))
        .fold(f64::INFINITY, f64::min)
}

/// Fraction of an n×n grid over the target footprint lying over the anchor.
pub fn sampled_overlap(target: &OrientedBox, anchor: &OrientedBox, n: usize) -> f64 {
    let h = target.size();
    let mut hit = 0;
    for i in 0..n {
        for j in 0..n {
            let q = [
                ((i as f64 + 0.5) / n as f64 - 0.5) * h[0],
                ((j as f64 + 0.5) / n as f64 - 0.5) * h[1],
                0.0,
            ];
            let mut p = world(target, q);
            p[2] = anchor.center()[2];
            if inside_footprint(anchor, p) {
                hit += 1;
            }
        }
    }
    hit as f64 / (n * n) as f64
}

/// Fraction of an n³ grid over the target volume inside the anchor.
pub fn sampled_containment(target: &OrientedBox, anchor: &OrientedBox, n: usize) -> f64 {
    let h = target.size();
    let mut hit = 0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let f = |m: usize| (m as f64 + 0.5) / n as f64 - 0.5;
                let p = world(target, [f(i) * h[0], f(j) * h[1], f(k) * h[2]]);
                if inside(anchor, p) {
                    hit += 1;
                }
            }
        }
    }
    hit as f64 / (n * n * n) as f64
}

/// Between by sampling the anchor segment: the nearest sample must be an
/// interior one and lie within the half-width.
pub fn sampled_between(t: [f64; 3], a: [f64; 3], b: [f64; 3], half_width: f64, n: usize) -> bool {
    let mut best = (f64::INFINITY, 0);
    for k in 0..=n {
        let s = k as f64 / n as f64;
        let p = [
            a[0] + s * (b[0] - a[0]),
            a[1] + s * (b[1] - a[1]),
            a[2] + s * (b[2] - a[2]),
        ];
        let d = ((t[0] - p[0]).powi(2) + (t[1] - p[1]).powi(2) + (t[2] - p[2]).powi(2)).sqrt();
        if d < best.0 {
            best = (d, k);
        }
    }
    best.1 > 0 && best.1 < n && best.0 <= half_width
}

/// Relation set by a direct loop over all pairs and triples.
pub fn naive_relations(
    region: &Region,
    objects: &[&SceneObject],
    cfg: &RelationConfig,
) -> BTreeSet<Relation> {
    let mut out = BTreeSet::new();
    let rid = region.id.as_str();
    for t in objects {
        for a in objects {
            if t.id == a.id {
                continue;
            }
            if !cfg.is_filtered(&t.class_nyu40) {
                for kind in [RelationType::Above, RelationType::On, RelationType::In] {
                    if eval_binary(kind, t, a, cfg).unwrap() {
                        out.insert(Relation::new(kind, &t.id, &[&a.id], rid));
                    }
                }
            }
            let both_filtered = cfg.is_filtered(&t.class_nyu40) && cfg.is_filtered(&a.class_nyu40);
            if !both_filtered && eval_binary(RelationType::Near, t, a, cfg).unwrap() {
                out.insert(Relation::near(&t.id, &a.id, rid));
            }
            if cfg.is_filtered(&t.class_nyu40) {
                continue;
            }
            for b in objects {
                if b.id != t.id && b.id != a.id && eval_between(t, a, b, cfg) {
                    out.insert(Relation::new(
                        RelationType::Between,
                        &t.id,
                        &[&a.id, &b.id],
                        rid,
                    ));
                }
            }
        }
    }
    for anchor in objects {
        let classes: BTreeSet<&str> = objects
            .iter()
            .map(|o| o.class_nyu40.as_str())
            .filter(|c| *c != anchor.class_nyu40 && !cfg.is_filtered(c))
            .collect();
        for class in classes {
            let mut ranked: Vec<(f64, &str)> = objects
                .iter()
                .filter(|o| o.class_nyu40 == class)
                .map(|o| {
                    let (p, q) = (o.bbox.center(), anchor.bbox.center());
                    (
                        ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2))
                            .sqrt(),
                        o.id.as_str(),
                    )
                })
                .collect();
            ranked.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(y.1)));
            out.insert(Relation::new(
                RelationType::Closest,
                ranked[0].1,
                &[&anchor.id],
                rid,
            ));
            let far = ranked
                .iter()
                .max_by(|x, y| x.0.total_cmp(&y.0).then_with(|| y.1.cmp(x.1)))
                .unwrap();
            out.insert(Relation::new(
                RelationType::Farthest,
                far.1,
                &[&anchor.id],
                rid,
            ));
        }
    }
    out
}

const CLASSES: [&str; 7] = ["chair", "table", "lamp", "bed", "wall", "sofa", "otherprop"];

/// A region of `n` random objects, with stacked and nested placements.
pub fn random_region_objects(r: &mut ChaCha8Rng, n: usize, extent: f64) -> Vec<SceneObject> {
    let mut objects: Vec<SceneObject> = Vec::with_capacity(n);
    for i in 0..n {
        let bbox = if i > 0 && r.gen_bool(0.5) {
            let base = objects[r.gen_range(0..i)].bbox;
            related_box(r, &base)
        } else {
            random_box(r, extent)
        };
        objects.push(SceneObject {
            id: format!("o{i:03}"),
            raw_label: String::new(),
            class_nyu40: CLASSES[r.gen_range(0..CLASSES.len())].to_string(),
            bbox,
            colors: vec!["gray".into()],
            region_id: "r".into(),
        });
    }
    objects
}

const COLORS: [&str; 3] = ["red", "blue", "green"];
const GRAPH_CLASSES: [&str; 4] = ["chair", "table", "lamp", "bed"];

/// Random graph over up to `max_nodes` nodes with random typed edges.
pub fn random_graph(r: &mut ChaCha8Rng, max_nodes: usize) -> SceneGraph {
    let n = r.gen_range(2..=max_nodes);
    let nodes: Vec<Node> = (0..n)
        .map(|i| Node {
            id: format!("n{i:02}"),
            kind: NodeKind::Object,
            class: GRAPH_CLASSES[r.gen_range(0..GRAPH_CLASSES.len())].into(),
            raw_label: None,
            colors: vec![COLORS[r.gen_range(0..COLORS.len())].into()],
            size: [None, Some(SizeLabel::Large), Some(SizeLabel::Small)][r.gen_range(0..3)],
            bbox: OrientedBox::new([i as f64, 0.0, 0.5], [0.5; 3], 0.0).unwrap(),
        })
        .collect();
    let edge_count = r.gen_range(0..=3 * n);
    let mut edges = Vec::new();
    for _ in 0..edge_count {
        let kind = RelationType::ALL[r.gen_range(0..8)];
        let t = r.gen_range(0..n);
        let a = r.gen_range(0..n);
        if a == t {
            continue;
        }
        if kind == RelationType::Between {
            let b = r.gen_range(0..n);
            if b == t || b == a {
                continue;
            }
            edges.push(Relation::new(
                kind,
                &nodes[t].id,
                &[&nodes[a].id, &nodes[b].id],
                "g",
            ));
        } else {
            edges.push(Relation::new(kind, &nodes[t].id, &[&nodes[a].id], "g"));
        }
    }
    SceneGraph::new("g", nodes, edges).unwrap()
}

fn random_spec(r: &mut ChaCha8Rng) -> QueryNode {
    let mut q = QueryNode::new(GRAPH_CLASSES[r.gen_range(0..GRAPH_CLASSES.len())]);
    if r.gen_bool(0.3) {
        q.attributes.push(Attribute::Color(
            COLORS[r.gen_range(0..COLORS.len())].into(),
        ));
    }
    if r.gen_bool(0.2) {
        q.attributes.push(Attribute::Size(if r.gen_bool(0.5) {
            SizeLabel::Large
        } else {
            SizeLabel::Small
        }));
    }
    q.attributes.sort();
    q
}

/// Random valid query with one or two relations; each anchor slot is used
/// by exactly one relation.
pub fn random_query(r: &mut ChaCha8Rng) -> SubgraphQuery {
    let target = random_spec(r);
    let mut anchors = Vec::new();
    let mut relations = Vec::new();
    for _ in 0..r.gen_range(1..=2) {
        let kind = RelationType::ALL[r.gen_range(0..8)];
        let mut slots = Vec::new();
        for _ in 0..kind.anchor_count() {
            slots.push(anchors.len());
            anchors.push(random_spec(r));
        }
        relations.push(QueryRelation {
            kind,
            anchors: slots,
        });
    }
    SubgraphQuery {
        target,
        anchors,
        relations,
    }
}

/// A query read off an existing edge, so that it has at least one match.
pub fn query_from_edge(r: &mut ChaCha8Rng, graph: &SceneGraph) -> Option<SubgraphQuery> {
    if graph.edges().is_empty() {
        return None;
    }
    let e = &graph.edges()[r.gen_range(0..graph.edges().len())];
    let spec = |id: &str, r: &mut ChaCha8Rng| {
        let node = graph.node(id).unwrap();
        let mut q = QueryNode::new(&node.class);
        if r.gen_bool(0.4) {
            q.attributes.push(Attribute::Color(node.colors[0].clone()));
        }
        q
    };
    let target = spec(&e.target, r);
    let anchors: Vec<QueryNode> = e.anchors.iter().map(|a| spec(a, r)).collect();
    Some(SubgraphQuery::simple(target, e.kind, anchors))
}

/// A query of the shape the statement generator emits: classes with their
/// raw-label nouns, palette colors and size labels, one to three relations
/// including the ternary one.
pub fn renderable_query(r: &mut ChaCha8Rng) -> SubgraphQuery {
    use refground_core::language::noun_for;
    use refground_core::scene::{LabelMapping, NYU40, PALETTE};

    let labels: Vec<(&str, &str)> = LabelMapping::shipped().entries().collect();
    let spec = |r: &mut ChaCha8Rng| {
        let (raw, class) = if r.gen_bool(0.5) {
            labels[r.gen_range(0..labels.len())]
        } else {
            let c = NYU40[r.gen_range(0..NYU40.len())];
            (c, c)
        };
        let node = Node {
            id: "x".into(),
            kind: NodeKind::Object,
            class: class.into(),
            raw_label: Some(raw.into()),
            colors: vec![],
            size: None,
            bbox: OrientedBox::new([0.0; 3], [1.0; 3], 0.0).unwrap(),
        };
        let mut q = QueryNode::new(class);
        q.noun = noun_for(&node);
        if r.gen_bool(0.4) {
            q.attributes.push(Attribute::Color(
                PALETTE[r.gen_range(0..PALETTE.len())].0.into(),
            ));
        }
        if r.gen_bool(0.25) {
            q.attributes.push(Attribute::Size(if r.gen_bool(0.5) {
                SizeLabel::Large
            } else {
                SizeLabel::Small
            }));
        }
        q.attributes.sort();
        q
    };
    let target = spec(r);
    let mut anchors = Vec::new();
    let mut relations = Vec::new();
    let count = [1, 1, 1, 2, 3][r.gen_range(0..5)];
    for _ in 0..count {
        let kind = RelationType::ALL[r.gen_range(0..8)];
        let mut slots = Vec::new();
        for _ in 0..kind.anchor_count() {
            slots.push(anchors.len());
            anchors.push(spec(r));
        }
        relations.push(QueryRelation {
            kind,
            anchors: slots,
        });
    }
    SubgraphQuery {
        target,
        anchors,
        relations,
    }
}
