use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::external::{ExternalError, JsonEndpoint};
use crate::query::SubgraphQuery;

const FEW_SHOT_JSON: &str = include_str!("../../data/few_shot.json");

/// A prompt exemplar: a statement and its expected query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FewShotExample {
    pub statement: String,
    pub query: SubgraphQuery,
}

/// The five exemplars shipped in `data/few_shot.json`.
pub fn few_shot_examples() -> &'static [FewShotExample] {
    static EXAMPLES: OnceLock<Vec<FewShotExample>> = OnceLock::new();
    EXAMPLES.get_or_init(|| {
        serde_json::from_str(FEW_SHOT_JSON).expect("shipped few-shot examples are valid")
    })
}

/// Sends `{"statement", "examples"}` and validates the reply as a query.
pub fn external_parse(
    endpoint: &dyn JsonEndpoint,
    text: &str,
    examples: &[FewShotExample],
) -> Result<SubgraphQuery, ExternalError> {
    let response = endpoint.post(&json!({ "statement": text, "examples": examples }))?;
    let query: SubgraphQuery = serde_json::from_value(response)
        .map_err(|e| ExternalError::InvalidResponse(e.to_string()))?;
    let query = query.normalized();
    query
        .validate()
        .map_err(|e| ExternalError::InvalidResponse(e.to_string()))?;
    Ok(query)
}
