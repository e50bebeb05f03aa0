use serde::{Deserialize, Serialize};

use super::descriptors::{descriptor_candidates, is_target_eligible};
use super::{render_query, LanguageConfig, Perturbation, SynonymTable};
use crate::brute;
use crate::graph::SceneGraph;
use crate::query::SubgraphQuery;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatementRecord {
    pub text: String,
    pub region_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_id: Option<String>,
    pub query: SubgraphQuery,
    pub is_imperfect: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
    pub seed: u64,
}

impl StatementRecord {
    /// Imperfect records have a perturbation and no target, perfect ones
    /// the reverse.
    pub fn is_consistent(&self) -> bool {
        self.is_imperfect == self.target_id.is_none()
            && self.is_imperfect == self.perturbation.is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Generated {
    pub records: Vec<StatementRecord>,
    /// Eligible targets without any unambiguous descriptor.
    pub skipped: usize,
}

/// Perfect statements for every eligible target of the graph, in target id
/// order. Each is checked by exhaustive enumeration to match only its
/// target before it is emitted.
pub fn generate_statements(
    graph: &SceneGraph,
    config: &LanguageConfig,
    synonyms: &SynonymTable,
    base_seed: u64,
) -> Generated {
    let mut out = Generated::default();
    for node in graph.nodes() {
        if !is_target_eligible(node, config) {
            continue;
        }
        let queries = descriptor_candidates(graph, &node.id, config.statements_per_target.max(1))
            .expect("node comes from the graph");
        if queries.is_empty() {
            out.skipped += 1;
            continue;
        }
        for (k, query) in queries.into_iter().enumerate() {
            let verified = brute::matching_targets(graph, &query);
            if verified.len() != 1 || !verified.contains(&node.id) {
                log::warn!(
                    "descriptor for '{}' failed exhaustive verification",
                    node.id
                );
                continue;
            }
            let seed = seed::derive(base_seed, &[graph.region_id(), &node.id, &k.to_string()]);
            out.records.push(StatementRecord {
                text: render_query(&query, synonyms, Some(seed)),
                region_id: graph.region_id().to_string(),
                target_id: Some(node.id.clone()),
                query,
                is_imperfect: false,
                perturbation: None,
                seed,
            });
        }
    }
    out
}
