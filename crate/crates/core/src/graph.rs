//! Per-region scene graphs: object and free-space nodes joined by typed
//! relation edges.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::OrientedBox;
use crate::relations::{
    freespace_relations, generate_relations, Relation, RelationConfig, RelationType,
};
use crate::scene::{FreeSpace, Region, Scene, SceneObject, FREE_SPACE_CLASS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Object,
    FreeSpace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeLabel {
    Large,
    Small,
}

impl SizeLabel {
    pub fn name(self) -> &'static str {
        match self {
            SizeLabel::Large => "large",
            SizeLabel::Small => "small",
        }
    }

    pub fn flipped(self) -> SizeLabel {
        match self {
            SizeLabel::Large => SizeLabel::Small,
            SizeLabel::Small => SizeLabel::Large,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_label: Option<String>,
    #[serde(default)]
    pub colors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<SizeLabel>,
    #[serde(rename = "box")]
    pub bbox: OrientedBox,
}

impl Node {
    pub fn from_object(o: &SceneObject) -> Self {
        Node {
            id: o.id.clone(),
            kind: NodeKind::Object,
            class: o.class_nyu40.clone(),
            raw_label: Some(o.raw_label.clone()),
            colors: o.colors.clone(),
            size: None,
            bbox: o.bbox,
        }
    }

    pub fn from_free_space(f: &FreeSpace) -> Self {
        Node {
            id: f.id.clone(),
            kind: NodeKind::FreeSpace,
            class: FREE_SPACE_CLASS.to_string(),
            raw_label: None,
            colors: Vec::new(),
            size: None,
            bbox: f.bbox,
        }
    }

    /// The color used when matching color attributes.
    pub fn dominant_color(&self) -> Option<&str> {
        self.colors.first().map(String::as_str)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("edge {edge} references unknown node '{id}'")]
    UnknownNode { id: String, edge: String },
    #[error("malformed edge {0}")]
    MalformedEdge(String),
    #[error("edge {edge} belongs to region '{found}', graph is '{expected}'")]
    RegionMismatch {
        edge: String,
        expected: String,
        found: String,
    },
    #[error("duplicate node '{0}'")]
    DuplicateNode(String),
    #[error("no node '{0}' in graph")]
    NoSuchNode(String),
    #[error("graph document: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    AsTarget,
    AsAnchor,
}

const NONE: usize = usize::MAX;

/// Immutable region graph with adjacency indices.
#[derive(Debug, Clone)]
pub struct SceneGraph {
    region_id: String,
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    edges: Vec<Relation>,
    as_target: Vec<Vec<usize>>,
    as_anchor: Vec<Vec<usize>>,
    adjacent: Vec<Vec<usize>>,
    keys: HashSet<(RelationType, usize, usize, usize)>,
}

impl PartialEq for SceneGraph {
    fn eq(&self, other: &Self) -> bool {
        self.region_id == other.region_id && self.nodes == other.nodes && self.edges == other.edges
    }
}

fn describe(edge: &Relation) -> String {
    format!(
        "{}({} -> {})",
        edge.kind,
        edge.target,
        edge.anchors.join(", ")
    )
}

impl SceneGraph {
    /// Builds the graph and its indices. Nodes are ordered by id and edges
    /// canonically; `Between` anchors are normalized to sorted order.
    pub fn new(
        region_id: &str,
        mut nodes: Vec<Node>,
        edges: Vec<Relation>,
    ) -> Result<Self, GraphError> {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateNode(n.id.clone()));
            }
        }
        let mut edges: Vec<Relation> = edges
            .into_iter()
            .map(|mut e| {
                if e.kind == RelationType::Between {
                    e.anchors.sort();
                }
                e
            })
            .collect();
        edges.sort();
        edges.dedup();

        let n = nodes.len();
        let mut graph = SceneGraph {
            region_id: region_id.to_string(),
            nodes,
            index,
            edges: Vec::new(),
            as_target: vec![Vec::new(); n],
            as_anchor: vec![Vec::new(); n],
            adjacent: vec![Vec::new(); n],
            keys: HashSet::with_capacity(edges.len()),
        };
        let mut adjacent: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (e, edge) in edges.iter().enumerate() {
            if edge.region_id != region_id {
                return Err(GraphError::RegionMismatch {
                    edge: describe(edge),
                    expected: region_id.to_string(),
                    found: edge.region_id.clone(),
                });
            }
            if !edge.is_well_formed() {
                return Err(GraphError::MalformedEdge(describe(edge)));
            }
            let lookup = |id: &String| {
                graph
                    .index
                    .get(id)
                    .copied()
                    .ok_or_else(|| GraphError::UnknownNode {
                        id: id.clone(),
                        edge: describe(edge),
                    })
            };
            let t = lookup(&edge.target)?;
            let anchors = edge
                .anchors
                .iter()
                .map(lookup)
                .collect::<Result<Vec<_>, _>>()?;
            graph.as_target[t].push(e);
            for &a in &anchors {
                if !graph.as_anchor[a].contains(&e) {
                    graph.as_anchor[a].push(e);
                }
                adjacent[t].insert(a);
                adjacent[a].insert(t);
            }
            graph.keys.insert((
                edge.kind,
                t,
                anchors[0],
                anchors.get(1).copied().unwrap_or(NONE),
            ));
        }
        graph.adjacent = adjacent
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        graph.edges = edges;
        Ok(graph)
    }

    pub fn region_id(&self) -> &str {
        &self.region_id
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Relation] {
        &self.edges
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Nodes sharing at least one edge with node `i`, ascending.
    pub fn adjacent(&self, i: usize) -> &[usize] {
        &self.adjacent[i]
    }

    /// Classes present among the nodes, sorted.
    pub fn classes(&self) -> BTreeSet<&str> {
        self.nodes.iter().map(|n| n.class.as_str()).collect()
    }

    /// Stored edges incident to `node_id` in the given role, in canonical
    /// order (type, then target, then anchors).
    pub fn neighbors(
        &self,
        node_id: &str,
        kind: Option<RelationType>,
        direction: Direction,
    ) -> Result<Vec<&Relation>, GraphError> {
        let i = self
            .node_index(node_id)
            .ok_or_else(|| GraphError::NoSuchNode(node_id.to_string()))?;
        let list = match direction {
            Direction::AsTarget => &self.as_target[i],
            Direction::AsAnchor => &self.as_anchor[i],
        };
        Ok(list
            .iter()
            .map(|&e| &self.edges[e])
            .filter(|e| kind.is_none_or(|k| e.kind == k))
            .collect())
    }

    fn stored(&self, kind: RelationType, t: usize, a: usize, b: usize) -> bool {
        self.keys.contains(&(kind, t, a, b))
    }

    /// Whether relation `kind` holds with node `t` as subject, reading the
    /// stored edges with their derived forms: `Below` is the converse of
    /// `Above`, `Near` is symmetric and `Between` ignores anchor order.
    pub fn holds(&self, kind: RelationType, t: usize, anchors: &[usize]) -> bool {
        match (kind, anchors) {
            (RelationType::Between, &[a, b]) => {
                self.stored(kind, t, a, b) || self.stored(kind, t, b, a)
            }
            (RelationType::Above, &[a]) => {
                self.stored(RelationType::Above, t, a, NONE)
                    || self.stored(RelationType::Below, a, t, NONE)
            }
            (RelationType::Below, &[a]) => {
                self.stored(RelationType::Below, t, a, NONE)
                    || self.stored(RelationType::Above, a, t, NONE)
            }
            (RelationType::Near, &[a]) => {
                self.stored(RelationType::Near, t, a, NONE)
                    || self.stored(RelationType::Near, a, t, NONE)
            }
            (RelationType::Between, _) => false,
            (_, &[a]) => self.stored(kind, t, a, NONE),
            _ => false,
        }
    }

    /// Every relation instance with node `t` as subject under the derived
    /// reading of [`SceneGraph::holds`], as `(type, anchor indices)`.
    pub fn subject_relations(&self, t: usize) -> Vec<(RelationType, Vec<usize>)> {
        let mut out = BTreeSet::new();
        for &e in &self.as_target[t] {
            let edge = &self.edges[e];
            let anchors: Vec<usize> = edge.anchors.iter().map(|a| self.index[a]).collect();
            out.insert((edge.kind, anchors));
        }
        for &e in &self.as_anchor[t] {
            let edge = &self.edges[e];
            let other = self.index[&edge.target];
            match edge.kind {
                RelationType::Above => {
                    out.insert((RelationType::Below, vec![other]));
                }
                RelationType::Below => {
                    out.insert((RelationType::Above, vec![other]));
                }
                RelationType::Near => {
                    out.insert((RelationType::Near, vec![other]));
                }
                _ => {}
            }
        }
        out.into_iter().collect()
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            region_id: self.region_id.clone(),
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    kind: e.kind,
                    target: e.target.clone(),
                    anchors: e.anchors.clone(),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: GraphDocument) -> Result<Self, GraphError> {
        let edges = doc
            .edges
            .into_iter()
            .map(|e| Relation {
                kind: e.kind,
                target: e.target,
                anchors: e.anchors,
                region_id: doc.region_id.clone(),
            })
            .collect();
        SceneGraph::new(&doc.region_id, doc.nodes, edges)
    }

    /// Deterministic pretty-printed JSON.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("graph documents always serialize")
    }

    pub fn from_json_str(text: &str) -> Result<Self, GraphError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: GraphDocument = serde_path_to_error::deserialize(de)
            .map_err(|e| GraphError::Schema(format!("at '{}': {}", e.path(), e.inner())))?;
        SceneGraph::from_document(doc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub region_id: String,
    pub nodes: Vec<Node>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    #[serde(rename = "type")]
    pub kind: RelationType,
    pub target: String,
    pub anchors: Vec<String>,
}

/// Labels nodes `large`/`small` by volume against the median of their
/// class. Classes with a single instance get no label, nor do nodes at the
/// median.
pub fn assign_sizes(nodes: &mut [Node]) {
    let mut by_class: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for n in nodes.iter() {
        by_class
            .entry(n.class.clone())
            .or_default()
            .push(n.bbox.volume());
    }
    let medians: BTreeMap<String, f64> = by_class
        .into_iter()
        .filter(|(_, v)| v.len() >= 2)
        .map(|(c, mut v)| {
            v.sort_by(f64::total_cmp);
            let m = v.len() / 2;
            let median = if v.len() % 2 == 1 {
                v[m]
            } else {
                0.5 * (v[m - 1] + v[m])
            };
            (c, median)
        })
        .collect();
    for n in nodes.iter_mut() {
        n.size = medians.get(&n.class).and_then(|&median| {
            let v = n.bbox.volume();
            if v > median {
                Some(SizeLabel::Large)
            } else if v < median {
                Some(SizeLabel::Small)
            } else {
                None
            }
        });
    }
}

/// Assembles a region graph from its objects, free spaces and relations.
pub fn build_graph(
    region: &Region,
    objects: &[&SceneObject],
    free_spaces: &[&FreeSpace],
    relations: Vec<Relation>,
) -> Result<SceneGraph, GraphError> {
    let mut nodes: Vec<Node> = objects.iter().map(|o| Node::from_object(o)).collect();
    nodes.extend(free_spaces.iter().map(|f| Node::from_free_space(f)));
    assign_sizes(&mut nodes);
    SceneGraph::new(&region.id, nodes, relations)
}

/// Generates relations for one region and builds its graph.
pub fn region_graph(scene: &Scene, region: &Region, config: &RelationConfig) -> SceneGraph {
    let objects = scene.objects_in(region);
    let spaces = scene.free_spaces_in(region);
    let mut relations = generate_relations(region, &objects, config);
    relations.extend(freespace_relations(&spaces, &objects, config));
    build_graph(region, &objects, &spaces, relations)
        .expect("generated relations reference region nodes")
}

/// Graphs for every region of the scene, built in parallel and returned in
/// region order.
pub fn scene_graphs(scene: &Scene, config: &RelationConfig) -> Vec<SceneGraph> {
    scene
        .regions
        .par_iter()
        .map(|r| region_graph(scene, r, config))
        .collect()
}
