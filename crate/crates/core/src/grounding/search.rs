use std::collections::VecDeque;

use serde::Serialize;

use crate::graph::SceneGraph;
use crate::query::{Aspect, SubgraphQuery};

/// A binding of query slots to graph nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchResult {
    pub target: String,
    pub anchors: Vec<String>,
    pub complete: bool,
    pub matched_aspects: Vec<Aspect>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Existence {
    pub exists: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first: Option<MatchResult>,
}

/// Candidate target scan followed by depth-first anchor binding. Returns
/// node-index tuples (target first) in lexicographic order.
pub fn search_indices(graph: &SceneGraph, query: &SubgraphQuery) -> Vec<Vec<usize>> {
    let nodes = graph.nodes();
    let k = query.anchors.len();
    // Relations become checkable once their highest anchor slot is bound.
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut constrained = vec![false; k];
    for (r, rel) in query.relations.iter().enumerate() {
        for &s in &rel.anchors {
            if s < k {
                constrained[s] = true;
            }
        }
        match rel.anchors.iter().max() {
            Some(&m) if m < k => checks[m].push(r),
            _ => return Vec::new(),
        }
    }

    let mut candidates: VecDeque<usize> = (0..nodes.len())
        .filter(|&i| query.target.matches(&nodes[i]))
        .collect();
    let mut out = Vec::new();
    let mut binding = Vec::with_capacity(k + 1);
    while let Some(t) = candidates.pop_front() {
        binding.clear();
        binding.push(t);
        extend(graph, query, &checks, &constrained, &mut binding, &mut out);
    }
    out
}

fn extend(
    graph: &SceneGraph,
    query: &SubgraphQuery,
    checks: &[Vec<usize>],
    constrained: &[bool],
    binding: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let slot = binding.len() - 1;
    if slot == query.anchors.len() {
        out.push(binding.clone());
        return;
    }
    let spec = &query.anchors[slot];
    let t = binding[0];
    let all: Vec<usize>;
    let pool: &[usize] = if constrained[slot] {
        graph.adjacent(t)
    } else {
        all = (0..graph.nodes().len()).collect();
        &all
    };
    for &c in pool {
        if binding.contains(&c) || !spec.matches(&graph.nodes()[c]) {
            continue;
        }
        binding.push(c);
        let ok = checks[slot].iter().all(|&r| {
            let rel = &query.relations[r];
            let anchors: Vec<usize> = rel.anchors.iter().map(|&s| binding[s + 1]).collect();
            graph.holds(rel.kind, t, &anchors)
        });
        if ok {
            extend(graph, query, checks, constrained, binding, out);
        }
        binding.pop();
    }
}

/// All complete matches, ordered by target id then anchor ids.
pub fn subgraph_search(graph: &SceneGraph, query: &SubgraphQuery) -> Vec<MatchResult> {
    let aspects = query.aspects();
    search_indices(graph, query)
        .into_iter()
        .map(|b| MatchResult {
            target: graph.nodes()[b[0]].id.clone(),
            anchors: b[1..]
                .iter()
                .map(|&i| graph.nodes()[i].id.clone())
                .collect(),
            complete: true,
            matched_aspects: aspects.clone(),
        })
        .collect()
}

/// Distinct matched target ids, ascending.
pub fn matching_targets(graph: &SceneGraph, query: &SubgraphQuery) -> Vec<String> {
    let mut ids: Vec<String> = search_indices(graph, query)
        .into_iter()
        .map(|b| graph.nodes()[b[0]].id.clone())
        .collect();
    ids.dedup();
    ids
}

pub fn classify_existence(graph: &SceneGraph, query: &SubgraphQuery) -> Existence {
    let first = subgraph_search(graph, query).into_iter().next();
    Existence {
        exists: first.is_some(),
        first,
    }
}
