use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::query::{Aspect, AspectKind, SubgraphQuery};

/// Per-kind aspect weights λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AspectWeights {
    pub class: f64,
    pub relation: f64,
    pub attribute: f64,
}

impl Default for AspectWeights {
    fn default() -> Self {
        AspectWeights {
            class: 3.0,
            relation: 2.0,
            attribute: 1.0,
        }
    }
}

impl AspectWeights {
    pub fn weight(&self, kind: AspectKind) -> f64 {
        match kind {
            AspectKind::Class => self.class,
            AspectKind::Relation => self.relation,
            AspectKind::Attribute => self.attribute,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        AspectWeights {
            class: self.class * factor,
            relation: self.relation * factor,
            attribute: self.attribute * factor,
        }
    }

    pub fn validate(&self) -> Result<(), ScoreError> {
        for w in [self.class, self.relation, self.attribute] {
            if !(w.is_finite() && w > 0.0) {
                return Err(ScoreError::BadWeight(w));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    pub value: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub weights: AspectWeights,
}

#[derive(Debug, Error, PartialEq)]
pub enum ScoreError {
    #[error("query has no aspects")]
    Empty,
    #[error("aspect weights must be positive, got {0}")]
    BadWeight(f64),
}

/// Weighted fraction of `aspects` present in `matched`.
pub fn score_aspects(
    aspects: &[Aspect],
    matched: &[Aspect],
    weights: &AspectWeights,
) -> Result<SimilarityScore, ScoreError> {
    if aspects.is_empty() {
        return Err(ScoreError::Empty);
    }
    weights.validate()?;
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for a in aspects {
        let w = weights.weight(a.kind());
        denominator += w;
        if matched.contains(a) {
            numerator += w;
        }
    }
    Ok(SimilarityScore {
        value: numerator / denominator,
        numerator,
        denominator,
        weights: *weights,
    })
}

/// The aspects of `query` that `candidate` keeps.
pub fn matched_aspects(query: &SubgraphQuery, candidate: &SubgraphQuery) -> Vec<Aspect> {
    let theirs = candidate.aspects();
    query
        .aspects()
        .into_iter()
        .filter(|a| theirs.contains(a))
        .collect()
}

pub fn score_similarity(
    query: &SubgraphQuery,
    candidate: &SubgraphQuery,
    weights: &AspectWeights,
) -> Result<SimilarityScore, ScoreError> {
    score_aspects(
        &query.aspects(),
        &matched_aspects(query, candidate),
        weights,
    )
}
