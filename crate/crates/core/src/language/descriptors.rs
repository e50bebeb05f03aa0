use super::LanguageConfig;
use crate::geometry::distance3;
use crate::graph::{GraphError, Node, NodeKind, SceneGraph};
use crate::grounding::matching_targets;
use crate::parser::{tokenize, ClassVocabulary};
use crate::query::{Attribute, QueryNode, SubgraphQuery};
use crate::relations::RelationType;
use crate::scene::classes::display_name;

/// Relation types in order of preference when describing a target.
const PREFERENCE: [RelationType; 8] = [
    RelationType::On,
    RelationType::In,
    RelationType::Above,
    RelationType::Below,
    RelationType::Near,
    RelationType::Closest,
    RelationType::Farthest,
    RelationType::Between,
];

/// The node's raw label when it is a parseable mention of its class and
/// differs from the class display name.
pub fn noun_for(node: &Node) -> Option<String> {
    let raw = node.raw_label.as_deref()?;
    let phrase = tokenize(raw).join(" ");
    let vocab = ClassVocabulary::shipped();
    let whole = tokenize(&phrase);
    let is_single_mention = vocab.longest_match(&whole, 0).map(|(len, _)| len) == Some(whole.len());
    (is_single_mention
        && vocab.lookup(&phrase) == Some(node.class.as_str())
        && phrase != display_name(&node.class))
    .then_some(phrase)
}

fn spec(node: &Node, color: bool, size: bool) -> Option<QueryNode> {
    let mut q = QueryNode::new(&node.class);
    q.noun = noun_for(node);
    if color {
        q.attributes
            .push(Attribute::Color(node.dominant_color()?.to_string()));
    }
    if size {
        q.attributes.push(Attribute::Size(node.size?));
    }
    q.attributes.sort();
    Some(q)
}

/// Whether another node of the target's class lies at the same centroid
/// distance from the anchor, so that "closest"/"farthest" would only hold
/// through the id tie-break.
fn superlative_is_tied(nodes: &[Node], t: usize, anchor: usize) -> bool {
    let origin = nodes[anchor].bbox.center();
    let d = distance3(nodes[t].bbox.center(), origin);
    nodes.iter().enumerate().any(|(i, n)| {
        i != t
            && n.class == nodes[t].class
            && (distance3(n.bbox.center(), origin) - d).abs() <= TIE_EPS
    })
}

const TIE_EPS: f64 = 1e-9;

/// Unique single-relation descriptors for a target at the smallest
/// attribute level that has any: no attributes, then color, then size,
/// then both. At most `limit` are returned, in relation preference order.
pub fn descriptor_candidates(
    graph: &SceneGraph,
    target_id: &str,
    limit: usize,
) -> Result<Vec<SubgraphQuery>, GraphError> {
    let t = graph
        .node_index(target_id)
        .ok_or_else(|| GraphError::NoSuchNode(target_id.to_string()))?;
    let nodes = graph.nodes();
    let mut relations: Vec<(RelationType, Vec<usize>)> = graph
        .subject_relations(t)
        .into_iter()
        .filter(|(_, anchors)| anchors.iter().all(|&a| nodes[a].kind == NodeKind::Object))
        .filter(|(kind, anchors)| {
            !(kind.is_superlative() && superlative_is_tied(nodes, t, anchors[0]))
        })
        .collect();
    let rank = |k: RelationType| {
        PREFERENCE
            .iter()
            .position(|&p| p == k)
            .unwrap_or(PREFERENCE.len())
    };
    relations.sort_by(|a, b| rank(a.0).cmp(&rank(b.0)).then_with(|| a.1.cmp(&b.1)));

    for (color, size) in [(false, false), (true, false), (false, true), (true, true)] {
        let Some(target) = spec(&nodes[t], color, size) else {
            continue;
        };
        let mut found = Vec::new();
        for (kind, anchors) in &relations {
            let anchor_specs = anchors
                .iter()
                .map(|&a| spec(&nodes[a], false, false))
                .collect::<Option<Vec<_>>>();
            let Some(anchor_specs) = anchor_specs else {
                continue;
            };
            let query = SubgraphQuery::simple(target.clone(), *kind, anchor_specs);
            if !found.contains(&query) && matching_targets(graph, &query) == [target_id] {
                found.push(query);
                if found.len() >= limit {
                    break;
                }
            }
        }
        if !found.is_empty() {
            return Ok(found);
        }
    }
    Ok(Vec::new())
}

/// The preferred minimal descriptor, if any disambiguates the target.
pub fn select_descriptors(
    graph: &SceneGraph,
    target_id: &str,
) -> Result<Option<SubgraphQuery>, GraphError> {
    Ok(descriptor_candidates(graph, target_id, 1)?
        .into_iter()
        .next())
}

pub(crate) fn is_target_eligible(node: &Node, config: &LanguageConfig) -> bool {
    !config.excluded_targets.contains(&node.class)
        && (config.free_space_targets || node.kind == NodeKind::Object)
}
