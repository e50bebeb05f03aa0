use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use serde_json::json;

use super::score::{matched_aspects, score_aspects, AspectWeights, SimilarityScore};
use super::search::matching_targets;
use crate::external::{ExternalError, JsonEndpoint};
use crate::graph::SceneGraph;
use crate::language::{render_query, SynonymTable};
use crate::query::{Aspect, Attribute, SubgraphQuery};
use crate::relations::RelationType;

/// Largest number of choices put to an external selector.
pub const MCQA_POOL: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternativeCandidate {
    pub query: SubgraphQuery,
    pub statement: String,
    pub target: String,
    pub matched_aspects: Vec<Aspect>,
    pub score: SimilarityScore,
}

/// Every query one aspect away from `query`: an attribute dropped or
/// replaced, a relation replaced by another of the same arity, or a node
/// class replaced by another class present in the graph.
pub fn relaxations(graph: &SceneGraph, query: &SubgraphQuery) -> Vec<SubgraphQuery> {
    let colors: BTreeSet<&str> = graph
        .nodes()
        .iter()
        .filter_map(|n| n.dominant_color())
        .collect();
    let classes = graph.classes();
    let mut out = Vec::new();
    let slots: Vec<_> = query.slots().collect();
    for &slot in &slots {
        let node = query.node(slot);
        for (i, attr) in node.attributes.iter().enumerate() {
            let mut dropped = query.clone();
            dropped.node_mut(slot).attributes.remove(i);
            out.push(dropped);
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
                q.node_mut(slot).attributes[i] = r;
                out.push(q.normalized());
            }
        }
    }
    for (i, rel) in query.relations.iter().enumerate() {
        for kind in RelationType::ALL {
            if kind != rel.kind && kind.anchor_count() == rel.kind.anchor_count() {
                let mut q = query.clone();
                q.relations[i].kind = kind;
                out.push(q);
            }
        }
    }
    for &slot in &slots {
        for class in &classes {
            if *class != query.node(slot).class {
                let mut q = query.clone();
                let node = q.node_mut(slot);
                node.class = class.to_string();
                node.noun = None;
                out.push(q);
            }
        }
    }
    let mut seen = HashSet::new();
    out.retain(|q| q != query && seen.insert(q.clone()));
    out
}

/// Existing alternatives reachable by single-aspect relaxation, best first
/// (score descending, then target id, then statement).
pub fn partial_matches(
    graph: &SceneGraph,
    query: &SubgraphQuery,
    weights: &AspectWeights,
    synonyms: &SynonymTable,
) -> Vec<AlternativeCandidate> {
    let aspects = query.aspects();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for relaxed in relaxations(graph, query) {
        let targets = matching_targets(graph, &relaxed);
        if targets.is_empty() {
            continue;
        }
        let matched = matched_aspects(query, &relaxed);
        let score = match score_aspects(&aspects, &matched, weights) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let statement = render_query(&relaxed, synonyms, None);
        for target in targets {
            if seen.insert((statement.clone(), target.clone())) {
                out.push(AlternativeCandidate {
                    query: relaxed.clone(),
                    statement: statement.clone(),
                    target,
                    matched_aspects: matched.clone(),
                    score: score.clone(),
                });
            }
        }
    }
    sort_candidates(&mut out);
    out
}

pub fn sort_candidates(candidates: &mut [AlternativeCandidate]) {
    candidates.sort_by(|a, b| {
        b.score
            .value
            .total_cmp(&a.score.value)
            .then_with(|| a.target.cmp(&b.target))
            .then_with(|| a.statement.cmp(&b.statement))
    });
}

/// Highest score, ties to the smaller target id.
pub fn select_heuristic(candidates: &[AlternativeCandidate]) -> Option<&AlternativeCandidate> {
    candidates.iter().reduce(|best, c| {
        if c.score.value > best.score.value
            || (c.score.value == best.score.value && c.target < best.target)
        {
            c
        } else {
            best
        }
    })
}

pub enum SelectionMode<'a> {
    Heuristic,
    External(&'a dyn JsonEndpoint),
}

/// Asks an external selector to pick one of `choices` for `statement`.
pub fn external_choice(
    endpoint: &dyn JsonEndpoint,
    statement: &str,
    choices: &[String],
) -> Result<usize, ExternalError> {
    let response = endpoint.post(&json!({ "statement": statement, "choices": choices }))?;
    let choice = response
        .get("choice")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| {
            ExternalError::InvalidResponse(format!(
                "expected {{\"choice\": index}}, got {response}"
            ))
        })?;
    if (choice as usize) < choices.len() {
        Ok(choice as usize)
    } else {
        Err(ExternalError::InvalidResponse(format!(
            "choice {choice} out of range for {} options",
            choices.len()
        )))
    }
}

/// Picks the alternative to suggest for a query with no exact match.
/// External selection falls back to the heuristic on any failure.
pub fn select_alternative(
    graph: &SceneGraph,
    query: &SubgraphQuery,
    statement: &str,
    mode: SelectionMode<'_>,
    weights: &AspectWeights,
    synonyms: &SynonymTable,
) -> Option<AlternativeCandidate> {
    let candidates = partial_matches(graph, query, weights, synonyms);
    if let SelectionMode::External(endpoint) = mode {
        let pool = &candidates[..candidates.len().min(MCQA_POOL)];
        if !pool.is_empty() {
            let choices: Vec<String> = pool.iter().map(|c| c.statement.clone()).collect();
            match external_choice(endpoint, statement, &choices) {
                Ok(i) => return Some(pool[i].clone()),
                Err(e) => log::warn!("external selection failed, using heuristic: {e}"),
            }
        }
    }
    select_heuristic(&candidates).cloned()
}
