use std::collections::HashMap;
use std::sync::OnceLock;

use crate::scene::classes::{class_phrases, LabelMapping};

/// Lowercases and splits on anything that is not alphanumeric or a hyphen.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !(c.is_alphanumeric() || c == '-'))
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Class mentions: NYU40 names, display names, the free-space class and
/// raw labels from the mapping table.
#[derive(Debug, Clone)]
pub struct ClassVocabulary {
    phrases: Vec<(Vec<String>, String)>,
    lookup: HashMap<String, String>,
}

impl ClassVocabulary {
    pub fn new(mapping: &LabelMapping) -> Self {
        let phrases = class_phrases(mapping);
        let lookup = phrases
            .iter()
            .map(|(p, c)| (p.join(" "), c.clone()))
            .collect();
        ClassVocabulary { phrases, lookup }
    }

    pub fn shipped() -> &'static ClassVocabulary {
        static VOCAB: OnceLock<ClassVocabulary> = OnceLock::new();
        VOCAB.get_or_init(|| ClassVocabulary::new(LabelMapping::shipped()))
    }

    /// Class denoted by a whole phrase.
    pub fn lookup(&self, phrase: &str) -> Option<&str> {
        self.lookup.get(phrase).map(String::as_str)
    }

    /// Longest phrase starting at `pos`: `(token count, class)`.
    pub fn longest_match(&self, tokens: &[String], pos: usize) -> Option<(usize, &str)> {
        self.phrases
            .iter()
            .find(|(p, _)| tokens.len() >= pos + p.len() && tokens[pos..pos + p.len()] == p[..])
            .map(|(p, c)| (p.len(), c.as_str()))
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.phrases
            .iter()
            .flat_map(|(p, _)| p.iter().map(String::as_str))
    }
}
