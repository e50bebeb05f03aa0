//! The eight view-independent spatial relations and their exhaustive
//! generation over a region.

mod generate;
pub mod predicates;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::{compute_superlatives, freespace_relations, generate_relations};
pub use predicates::{eval_between, eval_binary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationType {
    Above,
    Below,
    Closest,
    Farthest,
    Between,
    Near,
    In,
    On,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RelationProperties {
    pub symmetric: bool,
    pub ternary: bool,
    pub inter_class: bool,
    pub contact: bool,
}

impl RelationType {
    pub const ALL: [RelationType; 8] = [
        RelationType::Above,
        RelationType::Below,
        RelationType::Closest,
        RelationType::Farthest,
        RelationType::Between,
        RelationType::Near,
        RelationType::In,
        RelationType::On,
    ];

    pub fn properties(self) -> RelationProperties {
        let mut p = RelationProperties::default();
        match self {
            RelationType::Near => p.symmetric = true,
            RelationType::Between => p.ternary = true,
            RelationType::Closest | RelationType::Farthest => p.inter_class = true,
            RelationType::On => p.contact = true,
            RelationType::Above | RelationType::Below | RelationType::In => {}
        }
        p
    }

    /// Number of anchors the relation takes.
    pub fn anchor_count(self) -> usize {
        if self.properties().ternary {
            2
        } else {
            1
        }
    }

    pub fn is_superlative(self) -> bool {
        self.properties().inter_class
    }

    pub fn name(self) -> &'static str {
        match self {
            RelationType::Above => "above",
            RelationType::Below => "below",
            RelationType::Closest => "closest",
            RelationType::Farthest => "farthest",
            RelationType::Between => "between",
            RelationType::Near => "near",
            RelationType::In => "in",
            RelationType::On => "on",
        }
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown relation type '{s}'"))
    }
}

/// A stored edge. `Near` is stored once per unordered pair (target is the
/// smaller id); `Below` is never stored by generation, only derived from
/// `Above`; `Between` anchors are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Relation {
    #[serde(rename = "type")]
    pub kind: RelationType,
    pub target: String,
    pub anchors: Vec<String>,
    pub region_id: String,
}

impl Relation {
    pub fn new(kind: RelationType, target: &str, anchors: &[&str], region_id: &str) -> Self {
        let mut anchors: Vec<String> = anchors.iter().map(|s| s.to_string()).collect();
        if kind == RelationType::Between {
            anchors.sort();
        }
        Relation {
            kind,
            target: target.to_string(),
            anchors,
            region_id: region_id.to_string(),
        }
    }

    /// Canonical `Near` edge for an unordered pair.
    pub fn near(a: &str, b: &str, region_id: &str) -> Self {
        let (t, n) = if a <= b { (a, b) } else { (b, a) };
        Relation::new(RelationType::Near, t, &[n], region_id)
    }

    pub fn is_well_formed(&self) -> bool {
        self.anchors.len() == self.kind.anchor_count()
            && !self.anchors.contains(&self.target)
            && (self.anchors.len() < 2 || self.anchors[0] != self.anchors[1])
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RelationError {
    #[error("relation '{0}' cannot be evaluated on this number of objects")]
    WrongArity(RelationType),
    #[error("target and anchor are the same object '{0}'")]
    SameObject(String),
    #[error("invalid relation config: {0}")]
    InvalidConfig(String),
}

/// Thresholds for the geometric predicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelationConfig {
    /// Maximum surface-to-surface gap (m) for `Near`.
    pub near_gap_max: f64,
    /// Vertical contact tolerance (m) for `On`.
    pub on_zgap_max: f64,
    /// Fraction of target volume inside the anchor for `In`.
    pub in_containment_min: f64,
    /// Corridor half-width (m) around the anchor segment for `Between`.
    pub between_corridor_halfwidth: f64,
    /// Fraction of target footprint over the anchor for `Above`/`On`.
    pub footprint_overlap_min: f64,
    /// Classes never used as relation targets.
    pub class_filter: BTreeSet<String>,
}

impl Default for RelationConfig {
    fn default() -> Self {
        Self {
            near_gap_max: 0.5,
            on_zgap_max: 0.05,
            in_containment_min: 0.9,
            between_corridor_halfwidth: 0.75,
            footprint_overlap_min: 0.2,
            class_filter: ["wall", "floor", "ceiling"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

impl RelationConfig {
    pub fn validate(&self) -> Result<(), RelationError> {
        let positive = [
            ("near_gap_max", self.near_gap_max),
            ("on_zgap_max", self.on_zgap_max),
            (
                "between_corridor_halfwidth",
                self.between_corridor_halfwidth,
            ),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(RelationError::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        let fractions = [
            ("in_containment_min", self.in_containment_min),
            ("footprint_overlap_min", self.footprint_overlap_min),
        ];
        for (name, v) in fractions {
            if !(v > 0.0 && v <= 1.0) {
                return Err(RelationError::InvalidConfig(format!(
                    "{name} must be in (0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_filtered(&self, class: &str) -> bool {
        self.class_filter.contains(class)
    }
}
