//! Subgraph search, existence classification and alternative suggestion.

mod alternatives;
mod score;
mod search;

pub use alternatives::{
    external_choice, partial_matches, relaxations, select_alternative, select_heuristic,
    sort_candidates, AlternativeCandidate, SelectionMode, MCQA_POOL,
};
pub use score::{
    matched_aspects, score_aspects, score_similarity, AspectWeights, ScoreError, SimilarityScore,
};
pub use search::{
    classify_existence, matching_targets, search_indices, subgraph_search, Existence, MatchResult,
};
