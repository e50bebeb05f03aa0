//! Exhaustive tuple enumeration: the reference semantics for query
//! matching, used to verify generated statements.

use std::collections::BTreeSet;

use crate::graph::SceneGraph;
use crate::query::SubgraphQuery;

/// Every injective assignment of graph nodes to query slots (target first,
/// then anchors) satisfying all node specs and relations, in lexicographic
/// order of node indices.
pub fn enumerate_bindings(graph: &SceneGraph, query: &SubgraphQuery) -> Vec<Vec<usize>> {
    let slots = 1 + query.anchors.len();
    let n = graph.nodes().len();
    let mut out = Vec::new();
    let mut tuple = vec![0usize; slots];
    if n < slots {
        return out;
    }
    loop {
        let distinct = (0..slots).all(|i| (0..i).all(|j| tuple[i] != tuple[j]));
        if distinct && satisfies(graph, query, &tuple) {
            out.push(tuple.clone());
        }
        // Odometer increment, last slot fastest.
        let mut k = slots;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            tuple[k] += 1;
            if tuple[k] < n {
                break;
            }
            tuple[k] = 0;
        }
    }
}

pub fn satisfies(graph: &SceneGraph, query: &SubgraphQuery, tuple: &[usize]) -> bool {
    let nodes = graph.nodes();
    if !query.target.matches(&nodes[tuple[0]]) {
        return false;
    }
    if !query
        .anchors
        .iter()
        .enumerate()
        .all(|(i, a)| a.matches(&nodes[tuple[i + 1]]))
    {
        return false;
    }
    query.relations.iter().all(|r| {
        let anchors: Vec<usize> = r.anchors.iter().map(|&s| tuple[s + 1]).collect();
        graph.holds(r.kind, tuple[0], &anchors)
    })
}

/// Ids of the distinct target nodes with at least one complete binding.
pub fn matching_targets(graph: &SceneGraph, query: &SubgraphQuery) -> BTreeSet<String> {
    enumerate_bindings(graph, query)
        .into_iter()
        .map(|t| graph.nodes()[t[0]].id.clone())
        .collect()
}
