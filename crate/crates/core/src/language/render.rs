use rand::Rng;
use thiserror::Error;

use super::SynonymTable;
use crate::query::{Aspect, QueryError, QueryNode, SubgraphQuery};
use crate::relations::RelationType;
use crate::seed;

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("aspect set has no target class")]
    NoClass,
    #[error(transparent)]
    Query(QueryError),
}

fn noun_phrase(node: &QueryNode) -> String {
    let mut words = vec!["the"];
    if let Some(size) = node.size() {
        words.push(size.name());
    }
    if let Some(color) = node.color() {
        words.push(color);
    }
    words.push(node.noun());
    words.join(" ")
}

/// Renders a query as "the [size] [color] noun <relation> the anchor ...".
/// `seed` picks each relation's synonym uniformly; `None` uses the
/// canonical forms.
pub fn render_query(query: &SubgraphQuery, synonyms: &SynonymTable, seed: Option<u64>) -> String {
    let mut rng = seed.map(seed::rng);
    let mut out = noun_phrase(&query.target);
    for (i, rel) in query.relations.iter().enumerate() {
        let forms = synonyms.forms(rel.kind);
        let form = match rng.as_mut() {
            Some(r) => &forms[r.gen_range(0..forms.len())],
            None => &forms[0],
        };
        if i > 0 {
            out.push_str(" and");
        }
        out.push(' ');
        out.push_str(form);
        for (j, &slot) in rel.anchors.iter().enumerate() {
            out.push_str(if j == 0 { " " } else { " and " });
            out.push_str(&noun_phrase(&query.anchors[slot]));
        }
    }
    out
}

/// Renders an aspect set (see [`SubgraphQuery::from_aspects`]).
pub fn render_statement(
    aspects: &[Aspect],
    synonyms: &SynonymTable,
    seed: Option<u64>,
) -> Result<String, RenderError> {
    let query = SubgraphQuery::from_aspects(aspects).map_err(|e| match e {
        QueryError::NoClass => RenderError::NoClass,
        other => RenderError::Query(other),
    })?;
    Ok(render_query(&query, synonyms, seed))
}

/// Whether `text` contains a surface form of `kind`.
pub fn mentions_relation(text: &str, kind: RelationType, synonyms: &SynonymTable) -> bool {
    let padded = format!(" {text} ");
    synonyms
        .forms(kind)
        .iter()
        .any(|f| padded.contains(&format!(" {f} ")))
}
