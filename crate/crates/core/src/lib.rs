//! Scene graphs, referential statements and subgraph grounding over
//! annotated 3D indoor scenes.

pub mod brute;
pub mod external;
pub mod geometry;
pub mod graph;
pub mod grounding;
pub mod language;
pub mod parser;
pub mod query;
pub mod relations;
pub mod scene;
pub mod seed;
