use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{render_query, LanguageConfig, StatementRecord, SynonymTable};
use crate::brute;
use crate::graph::SceneGraph;
use crate::grounding::matching_targets;
use crate::query::{AspectKind, Attribute, Slot, SubgraphQuery};
use crate::relations::RelationType;
use crate::scene::ClassGroups;
use crate::seed;

/// What an imperfect statement changed relative to its source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub aspect: AspectKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<Slot>,
    pub original: String,
    pub replacement: String,
    pub source_text: String,
}

struct Edit {
    query: SubgraphQuery,
    aspect: AspectKind,
    slot: Option<Slot>,
    original: String,
    replacement: String,
}

fn candidate_edits(graph: &SceneGraph, query: &SubgraphQuery) -> Vec<Edit> {
    let groups = ClassGroups::shipped();
    let colors: BTreeSet<&str> = graph
        .nodes()
        .iter()
        .filter_map(|n| n.dominant_color())
        .collect();
    let mut edits = Vec::new();
    for slot in query.slots() {
        let node = query.node(slot);
        for sibling in groups.siblings(&node.class) {
            let mut q = query.clone();
            let n = q.node_mut(slot);
            n.class = sibling.to_string();
            n.noun = None;
            edits.push(Edit {
                query: q,
                aspect: AspectKind::Class,
                slot: Some(slot),
                original: node.class.clone(),
                replacement: sibling.to_string(),
            });
        }
        for (i, attr) in node.attributes.iter().enumerate() {
            let replacements: Vec<Attribute> = match attr {
                Attribute::Color(c) => colors
                    .iter()
                    .filter(|&&o| o != c)
                    .map(|o| Attribute::Color(o.to_string()))
                    .collect(),
                Attribute::Size(s) => vec![Attribute::Size(s.flipped())],
            };
            for r in replacements {
                let mut q = query.clone();
                q.node_mut(slot).attributes[i] = r.clone();
                edits.push(Edit {
                    query: q.normalized(),
                    aspect: AspectKind::Attribute,
                    slot: Some(slot),
                    original: attr.word().to_string(),
                    replacement: r.word().to_string(),
                });
            }
        }
    }
    for (i, rel) in query.relations.iter().enumerate() {
        for kind in RelationType::ALL {
            if kind != rel.kind && kind.anchor_count() == rel.kind.anchor_count() {
                let mut q = query.clone();
                q.relations[i].kind = kind;
                edits.push(Edit {
                    query: q,
                    aspect: AspectKind::Relation,
                    slot: None,
                    original: rel.kind.name().to_string(),
                    replacement: kind.name().to_string(),
                });
            }
        }
    }
    edits
}

/// Alters exactly one aspect of a perfect statement to a similar value so
/// that nothing in the region matches. Edits are drawn in seeded random
/// order; `None` once the draw budget or the edit set is exhausted.
pub fn perturb_statement(
    record: &StatementRecord,
    graph: &SceneGraph,
    config: &LanguageConfig,
    synonyms: &SynonymTable,
) -> Option<StatementRecord> {
    if record.is_imperfect {
        return None;
    }
    let seed = seed::derive(record.seed, &["perturb"]);
    let mut edits = candidate_edits(graph, &record.query);
    edits.shuffle(&mut seed::rng(seed));
    edits
        .into_iter()
        .take(config.max_perturbation_draws)
        .find(|e| {
            matching_targets(graph, &e.query).is_empty()
                && brute::matching_targets(graph, &e.query).is_empty()
        })
        .map(|e| StatementRecord {
            text: render_query(&e.query, synonyms, Some(seed)),
            region_id: record.region_id.clone(),
            target_id: None,
            query: e.query,
            is_imperfect: true,
            perturbation: Some(Perturbation {
                aspect: e.aspect,
                slot: e.slot,
                original: e.original,
                replacement: e.replacement,
                source_text: record.text.clone(),
            }),
            seed,
        })
}
