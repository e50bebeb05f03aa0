//! Structured form of a referential statement: a target node spec, anchor
//! node specs and relation edges from the target to anchor slots.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Node, SizeLabel};
use crate::relations::RelationType;
use crate::scene::classes::display_name;
use crate::scene::color::is_palette_color;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Attribute {
    Color(String),
    Size(SizeLabel),
}

impl Attribute {
    pub fn matches(&self, node: &Node) -> bool {
        match self {
            Attribute::Color(c) => node.dominant_color() == Some(c.as_str()),
            Attribute::Size(s) => node.size == Some(*s),
        }
    }

    pub fn word(&self) -> &str {
        match self {
            Attribute::Color(c) => c,
            Attribute::Size(s) => s.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryNode {
    pub class: String,
    /// Surface noun when it differs from the class's display name ("cup"
    /// for `otherprop`). Never used for matching.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noun: Option<String>,
    #[serde(default)]
    pub attributes: Vec<Attribute>,
}

impl QueryNode {
    pub fn new(class: &str) -> Self {
        QueryNode {
            class: class.to_string(),
            noun: None,
            attributes: Vec::new(),
        }
    }

    pub fn with(mut self, attribute: Attribute) -> Self {
        self.attributes.push(attribute);
        self.attributes.sort();
        self
    }

    pub fn matches(&self, node: &Node) -> bool {
        node.class == self.class && self.attributes.iter().all(|a| a.matches(node))
    }

    pub fn noun(&self) -> &str {
        self.noun
            .as_deref()
            .unwrap_or_else(|| display_name(&self.class))
    }

    pub fn color(&self) -> Option<&str> {
        self.attributes.iter().find_map(|a| match a {
            Attribute::Color(c) => Some(c.as_str()),
            Attribute::Size(_) => None,
        })
    }

    pub fn size(&self) -> Option<SizeLabel> {
        self.attributes.iter().find_map(|a| match a {
            Attribute::Size(s) => Some(*s),
            Attribute::Color(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryRelation {
    #[serde(rename = "type")]
    pub kind: RelationType,
    /// Anchor slot indices; the subject is always the target.
    pub anchors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgraphQuery {
    pub target: QueryNode,
    #[serde(default)]
    pub anchors: Vec<QueryNode>,
    pub relations: Vec<QueryRelation>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error("query has no relation")]
    NoRelation,
    #[error("query has no class")]
    NoClass,
    #[error("relation '{kind}' takes {expected} anchor(s), got {found}")]
    Arity {
        kind: RelationType,
        expected: usize,
        found: usize,
    },
    #[error("relation references anchor slot {0}, which does not exist")]
    BadSlot(usize),
    #[error("anchor slot {0} is not used by any relation")]
    UnusedAnchor(usize),
    #[error("relation '{0}' repeats an anchor slot")]
    RepeatedSlot(RelationType),
    #[error("'{0}' is not a palette color")]
    BadColor(String),
    #[error("a node has more than one {0} attribute")]
    DuplicateAttribute(&'static str),
}

/// Which node of a query an aspect belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Target,
    Anchor(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AspectKind {
    Class,
    Relation,
    Attribute,
}

/// One atomic descriptor of a statement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "aspect", rename_all = "lowercase")]
pub enum Aspect {
    Class {
        slot: Slot,
        class: String,
    },
    Relation {
        kind: RelationType,
        anchors: Vec<usize>,
    },
    Attribute {
        slot: Slot,
        attribute: Attribute,
    },
}

impl Aspect {
    pub fn kind(&self) -> AspectKind {
        match self {
            Aspect::Class { .. } => AspectKind::Class,
            Aspect::Relation { .. } => AspectKind::Relation,
            Aspect::Attribute { .. } => AspectKind::Attribute,
        }
    }
}

impl SubgraphQuery {
    /// A single-relation query.
    pub fn simple(target: QueryNode, kind: RelationType, anchors: Vec<QueryNode>) -> Self {
        let slots = (0..anchors.len()).collect();
        SubgraphQuery {
            target,
            anchors,
            relations: vec![QueryRelation {
                kind,
                anchors: slots,
            }],
        }
    }

    pub fn validate(&self) -> Result<(), QueryError> {
        if self.relations.is_empty() {
            return Err(QueryError::NoRelation);
        }
        let mut used = BTreeSet::new();
        for r in &self.relations {
            if r.anchors.len() != r.kind.anchor_count() {
                return Err(QueryError::Arity {
                    kind: r.kind,
                    expected: r.kind.anchor_count(),
                    found: r.anchors.len(),
                });
            }
            if r.anchors.len() == 2 && r.anchors[0] == r.anchors[1] {
                return Err(QueryError::RepeatedSlot(r.kind));
            }
            for &s in &r.anchors {
                if s >= self.anchors.len() {
                    return Err(QueryError::BadSlot(s));
                }
                used.insert(s);
            }
        }
        if let Some(unused) = (0..self.anchors.len()).find(|s| !used.contains(s)) {
            return Err(QueryError::UnusedAnchor(unused));
        }
        for node in std::iter::once(&self.target).chain(&self.anchors) {
            if node.class.trim().is_empty() {
                return Err(QueryError::NoClass);
            }
            let mut colors = 0;
            let mut sizes = 0;
            for a in &node.attributes {
                match a {
                    Attribute::Color(c) => {
                        if !is_palette_color(c) {
                            return Err(QueryError::BadColor(c.clone()));
                        }
                        colors += 1;
                    }
                    Attribute::Size(_) => sizes += 1,
                }
            }
            if colors > 1 {
                return Err(QueryError::DuplicateAttribute("color"));
            }
            if sizes > 1 {
                return Err(QueryError::DuplicateAttribute("size"));
            }
        }
        Ok(())
    }

    /// Sorts every node's attributes (colors before sizes).
    pub fn normalized(mut self) -> Self {
        for node in std::iter::once(&mut self.target).chain(self.anchors.iter_mut()) {
            node.attributes.sort();
        }
        self
    }

    pub fn node(&self, slot: Slot) -> &QueryNode {
        match slot {
            Slot::Target => &self.target,
            Slot::Anchor(i) => &self.anchors[i],
        }
    }

    pub fn node_mut(&mut self, slot: Slot) -> &mut QueryNode {
        match slot {
            Slot::Target => &mut self.target,
            Slot::Anchor(i) => &mut self.anchors[i],
        }
    }

    pub fn slots(&self) -> impl Iterator<Item = Slot> {
        std::iter::once(Slot::Target).chain((0..self.anchors.len()).map(Slot::Anchor))
    }

    /// The aspect list: classes (target first), then relations, then
    /// attributes.
    pub fn aspects(&self) -> Vec<Aspect> {
        let mut out: Vec<Aspect> = self
            .slots()
            .map(|slot| Aspect::Class {
                slot,
                class: self.node(slot).class.clone(),
            })
            .collect();
        out.extend(self.relations.iter().map(|r| Aspect::Relation {
            kind: r.kind,
            anchors: r.anchors.clone(),
        }));
        for slot in self.slots() {
            out.extend(
                self.node(slot)
                    .attributes
                    .iter()
                    .map(|a| Aspect::Attribute {
                        slot,
                        attribute: a.clone(),
                    }),
            );
        }
        out
    }

    /// Rebuilds a query from an aspect list. Relations keep their listed
    /// anchor slots; every slot mentioned needs a class aspect.
    pub fn from_aspects(aspects: &[Aspect]) -> Result<Self, QueryError> {
        let mut target = None;
        let mut anchors: Vec<Option<QueryNode>> = Vec::new();
        let mut relations = Vec::new();
        let mut attributes = Vec::new();
        for a in aspects {
            match a {
                Aspect::Class {
                    slot: Slot::Target,
                    class,
                } => target = Some(QueryNode::new(class)),
                Aspect::Class {
                    slot: Slot::Anchor(i),
                    class,
                } => {
                    if anchors.len() <= *i {
                        anchors.resize(i + 1, None);
                    }
                    anchors[*i] = Some(QueryNode::new(class));
                }
                Aspect::Relation {
                    kind,
                    anchors: slots,
                } => relations.push(QueryRelation {
                    kind: *kind,
                    anchors: slots.clone(),
                }),
                Aspect::Attribute { slot, attribute } => {
                    attributes.push((*slot, attribute.clone()))
                }
            }
        }
        let target = target.ok_or(QueryError::NoClass)?;
        let anchors = anchors
            .into_iter()
            .enumerate()
            .map(|(i, a)| a.ok_or(QueryError::BadSlot(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut query = SubgraphQuery {
            target,
            anchors,
            relations,
        };
        for (slot, attribute) in attributes {
            if let Slot::Anchor(i) = slot {
                if i >= query.anchors.len() {
                    return Err(QueryError::BadSlot(i));
                }
            }
            query.node_mut(slot).attributes.push(attribute);
        }
        let query = query.normalized();
        query.validate()?;
        Ok(query)
    }
}
