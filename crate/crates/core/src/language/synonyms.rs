use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::relations::RelationType;

/// Surface forms per relation type; the first form is canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SynonymTable {
    forms: BTreeMap<RelationType, Vec<String>>,
}

impl Default for SynonymTable {
    fn default() -> Self {
        use RelationType::*;
        let table: [(RelationType, &[&str]); 8] = [
            (Above, &["above", "over"]),
            (Below, &["below", "under", "beneath", "underneath"]),
            (Closest, &["closest to", "nearest to"]),
            (
                Farthest,
                &["farthest from", "most distant from", "farthest away from"],
            ),
            (Between, &["between", "in the middle of", "in-between"]),
            (
                Near,
                &["near", "next to", "close to", "adjacent to", "beside"],
            ),
            (In, &["in", "inside", "within"]),
            (On, &["on", "on top of"]),
        ];
        SynonymTable {
            forms: table
                .into_iter()
                .map(|(k, v)| (k, v.iter().map(|s| s.to_string()).collect()))
                .collect(),
        }
    }
}

impl SynonymTable {
    pub fn new(forms: BTreeMap<RelationType, Vec<String>>) -> Result<Self, String> {
        let table = SynonymTable { forms };
        table.validate()?;
        Ok(table)
    }

    /// Every type has at least one form and no phrase names two types.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen: BTreeMap<String, RelationType> = BTreeMap::new();
        for kind in RelationType::ALL {
            let forms = self.forms.get(&kind).map(Vec::as_slice).unwrap_or_default();
            if forms.is_empty() {
                return Err(format!("relation '{kind}' has no surface form"));
            }
            for f in forms {
                let norm = f
                    .split_whitespace()
                    .collect::<Vec<_>>()
                    .join(" ")
                    .to_lowercase();
                if norm.is_empty() || norm != *f {
                    return Err(format!(
                        "form '{f}' must be lowercase, single-spaced and non-empty"
                    ));
                }
                if let Some(prev) = seen.insert(norm, kind) {
                    if prev != kind {
                        return Err(format!("form '{f}' names both '{prev}' and '{kind}'"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn forms(&self, kind: RelationType) -> &[String] {
        &self.forms[&kind]
    }

    pub fn canonical(&self, kind: RelationType) -> &str {
        &self.forms(kind)[0]
    }

    /// `(phrase tokens, type)` for every form, longest phrase first.
    pub fn phrases(&self) -> Vec<(Vec<String>, RelationType)> {
        let mut out: Vec<(Vec<String>, RelationType)> = self
            .forms
            .iter()
            .flat_map(|(k, v)| {
                v.iter()
                    .map(move |f| (f.split(' ').map(str::to_string).collect(), *k))
            })
            .collect();
        out.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }
}
