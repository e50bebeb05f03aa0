//! NYU40 class schema, raw-label mapping and coarse class groups.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

/// The 40 NYU40 classes, in schema order.
pub const NYU40: [&str; 40] = [
    "wall",
    "floor",
    "cabinet",
    "bed",
    "chair",
    "sofa",
    "table",
    "door",
    "window",
    "bookshelf",
    "picture",
    "counter",
    "blinds",
    "desk",
    "shelves",
    "curtain",
    "dresser",
    "pillow",
    "mirror",
    "floor mat",
    "clothes",
    "ceiling",
    "books",
    "refrigerator",
    "television",
    "paper",
    "towel",
    "shower curtain",
    "box",
    "whiteboard",
    "person",
    "night stand",
    "toilet",
    "sink",
    "lamp",
    "bathtub",
    "bag",
    "otherstructure",
    "otherfurniture",
    "otherprop",
];

/// Catch-all class for labels the mapping does not know.
pub const CATCH_ALL: &str = "otherprop";

/// Node class used for traversable free-space nodes.
pub const FREE_SPACE_CLASS: &str = "space";

const LABEL_MAP_TSV: &str = include_str!("../../data/label_map.tsv");
const CLASS_GROUPS_TSV: &str = include_str!("../../data/class_groups.tsv");

pub fn is_nyu40(class: &str) -> bool {
    NYU40.contains(&class)
}

/// Surface form used when a class is written into a sentence.
pub fn display_name(class: &str) -> &str {
    match class {
        "otherprop" => "object",
        "otherfurniture" => "furniture",
        "otherstructure" => "structure",
        other => other,
    }
}

fn normalize_label(label: &str) -> String {
    label
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Raw open-vocabulary label to NYU40 class table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabelMapping {
    entries: BTreeMap<String, String>,
}

impl LabelMapping {
    /// Parses a two-column tab-separated table; `#` starts a comment line.
    pub fn parse(tsv: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in tsv.lines().enumerate() {
            let line = line.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (raw, class) = line.split_once('\t').ok_or_else(|| {
                format!("line {}: expected two tab-separated columns", lineno + 1)
            })?;
            let class = normalize_label(class);
            if !is_nyu40(&class) {
                return Err(format!(
                    "line {}: '{class}' is not an NYU40 class",
                    lineno + 1
                ));
            }
            entries.insert(normalize_label(raw), class);
        }
        Ok(Self { entries })
    }

    /// The table shipped with the crate.
    pub fn shipped() -> &'static LabelMapping {
        static MAPPING: OnceLock<LabelMapping> = OnceLock::new();
        MAPPING
            .get_or_init(|| LabelMapping::parse(LABEL_MAP_TSV).expect("shipped label map is valid"))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Maps a raw label to its NYU40 class. Schema-native labels map to
/// themselves; unknown labels map to [`CATCH_ALL`].
pub fn map_class(raw_label: &str, mapping: &LabelMapping) -> String {
    let key = normalize_label(raw_label);
    if is_nyu40(&key) {
        return key;
    }
    mapping
        .entries
        .get(&key)
        .cloned()
        .unwrap_or_else(|| CATCH_ALL.to_string())
}

/// Coarse groupings of NYU40 classes ("similar" classes).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassGroups {
    group_of: BTreeMap<String, String>,
    members: BTreeMap<String, Vec<String>>,
}

impl ClassGroups {
    pub fn parse(tsv: &str) -> Result<Self, String> {
        let mut group_of = BTreeMap::new();
        let mut members: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (lineno, line) in tsv.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (group, list) = line.split_once('\t').ok_or_else(|| {
                format!("line {}: expected two tab-separated columns", lineno + 1)
            })?;
            for class in list.split(',').map(normalize_label) {
                if !is_nyu40(&class) {
                    return Err(format!(
                        "line {}: '{class}' is not an NYU40 class",
                        lineno + 1
                    ));
                }
                if let Some(prev) = group_of.insert(class.clone(), group.to_string()) {
                    return Err(format!("'{class}' listed in both '{prev}' and '{group}'"));
                }
                members.entry(group.to_string()).or_default().push(class);
            }
        }
        Ok(Self { group_of, members })
    }

    pub fn shipped() -> &'static ClassGroups {
        static GROUPS: OnceLock<ClassGroups> = OnceLock::new();
        GROUPS.get_or_init(|| {
            ClassGroups::parse(CLASS_GROUPS_TSV).expect("shipped class groups are valid")
        })
    }

    pub fn group_of(&self, class: &str) -> Option<&str> {
        self.group_of.get(class).map(String::as_str)
    }

    /// Other members of `class`'s group, in table order.
    pub fn siblings(&self, class: &str) -> Vec<&str> {
        let Some(group) = self.group_of.get(class) else {
            return Vec::new();
        };
        self.members[group]
            .iter()
            .filter(|c| c.as_str() != class)
            .map(String::as_str)
            .collect()
    }
}

/// Every phrase the statement parser accepts as a class mention, with the
/// class it denotes. Longer phrases come first so a greedy scan finds the
/// longest match.
pub fn class_phrases(mapping: &LabelMapping) -> Vec<(Vec<String>, String)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |phrase: &str, class: &str| {
        let phrase = normalize_label(phrase);
        if seen.insert(phrase.clone()) {
            out.push((
                phrase.split(' ').map(str::to_string).collect::<Vec<_>>(),
                class.to_string(),
            ));
        }
    };
    for class in NYU40 {
        push(display_name(class), class);
        push(class, class);
    }
    push(FREE_SPACE_CLASS, FREE_SPACE_CLASS);
    for (raw, class) in mapping.entries() {
        push(raw, class);
    }
    out.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
    out
}
