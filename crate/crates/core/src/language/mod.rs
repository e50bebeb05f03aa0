//! Referential statement generation: minimal unambiguous descriptors,
//! templated rendering with synonyms, and single-aspect perturbations.

mod descriptors;
mod generate;
mod perturb;
mod render;
mod synonyms;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use descriptors::{descriptor_candidates, noun_for, select_descriptors};
pub use generate::{generate_statements, Generated, StatementRecord};
pub use perturb::{perturb_statement, Perturbation};
pub use render::{mentions_relation, render_query, render_statement, RenderError};
pub use synonyms::SynonymTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LanguageConfig {
    /// Distinct minimal descriptors emitted per target, at most.
    pub statements_per_target: usize,
    /// Whether free spaces may be statement targets.
    pub free_space_targets: bool,
    /// Classes never used as statement targets.
    pub excluded_targets: BTreeSet<String>,
    /// Perturbation attempts before giving up on a statement.
    pub max_perturbation_draws: usize,
}

impl Default for LanguageConfig {
    fn default() -> Self {
        LanguageConfig {
            statements_per_target: 1,
            free_space_targets: true,
            excluded_targets: ["wall", "floor", "ceiling"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            max_perturbation_draws: 20,
        }
    }
}
