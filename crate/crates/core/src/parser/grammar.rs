use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use super::vocabulary::{tokenize, ClassVocabulary};
use crate::graph::SizeLabel;
use crate::language::SynonymTable;
use crate::query::{Attribute, QueryNode, QueryRelation, SubgraphQuery};
use crate::relations::RelationType;
use crate::scene::classes::display_name;
use crate::scene::color::PALETTE;

const DETERMINERS: [&str; 3] = ["the", "a", "an"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    ExactGrammar,
    Fuzzy,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseOutcome {
    pub query: SubgraphQuery,
    pub confidence: Confidence,
    /// Tokens ignored to reach a parse.
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseErrorKind {
    Empty,
    NoRelation,
    NoClass,
    Syntax,
}

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[error("{message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    /// Tokens outside the grammar's vocabulary.
    pub diagnostics: Vec<String>,
}

/// Recursive-descent parser over the statement templates:
///
/// ```text
/// statement := np clause ("and" clause)*
/// clause    := RELATION np | BETWEEN np "and" np
/// np        := det? (color | size)* CLASS
/// ```
pub struct Parser {
    classes: ClassVocabulary,
    relations: Vec<(Vec<String>, RelationType)>,
    known: HashSet<String>,
}

struct Cursor<'a> {
    tokens: &'a [String],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).map(String::as_str)
    }

    fn describe(&self) -> String {
        match self.peek() {
            Some(t) => format!("'{t}' at token {}", self.pos),
            None => "end of statement".to_string(),
        }
    }
}

impl Default for Parser {
    fn default() -> Self {
        Parser::new(&SynonymTable::default(), ClassVocabulary::shipped())
    }
}

fn color_word(word: &str) -> Option<Attribute> {
    PALETTE
        .iter()
        .find(|(name, _)| *name == word)
        .map(|(name, _)| Attribute::Color(name.to_string()))
}

fn size_word(word: &str) -> Option<Attribute> {
    match word {
        "large" => Some(Attribute::Size(SizeLabel::Large)),
        "small" => Some(Attribute::Size(SizeLabel::Small)),
        _ => None,
    }
}

impl Parser {
    pub fn new(synonyms: &SynonymTable, classes: &ClassVocabulary) -> Self {
        let relations = synonyms.phrases();
        let mut known: HashSet<String> = classes.words().map(str::to_string).collect();
        known.extend(relations.iter().flat_map(|(p, _)| p.iter().cloned()));
        known.extend(PALETTE.iter().map(|(n, _)| n.to_string()));
        known.extend(["large", "small", "and"].map(str::to_string));
        known.extend(DETERMINERS.map(str::to_string));
        Parser {
            classes: classes.clone(),
            relations,
            known,
        }
    }

    pub fn parse(&self, text: &str) -> Result<ParseOutcome, ParseError> {
        let tokens = tokenize(text);
        if tokens.is_empty() {
            return Err(ParseError {
                kind: ParseErrorKind::Empty,
                message: "empty statement".into(),
                diagnostics: Vec::new(),
            });
        }
        let unknown: Vec<String> = tokens
            .iter()
            .filter(|t| !self.known.contains(*t))
            .cloned()
            .collect();
        let first_error = match self.parse_tokens(&tokens) {
            Ok(query) => {
                return Ok(ParseOutcome {
                    query,
                    confidence: Confidence::ExactGrammar,
                    diagnostics: Vec::new(),
                })
            }
            Err(message) => message,
        };
        if !unknown.is_empty() {
            let kept: Vec<String> = tokens
                .iter()
                .filter(|t| self.known.contains(*t))
                .cloned()
                .collect();
            if let Ok(query) = self.parse_tokens(&kept) {
                return Ok(ParseOutcome {
                    query,
                    confidence: Confidence::Fuzzy,
                    diagnostics: unknown,
                });
            }
        }
        let has_relation = (0..tokens.len()).any(|i| self.relation_at(&tokens, i).is_some());
        let has_class = (0..tokens.len()).any(|i| self.classes.longest_match(&tokens, i).is_some());
        let (kind, message) = if !has_relation {
            (
                ParseErrorKind::NoRelation,
                "no relation phrase found".to_string(),
            )
        } else if !has_class {
            (ParseErrorKind::NoClass, "no object class found".to_string())
        } else {
            (ParseErrorKind::Syntax, first_error)
        };
        Err(ParseError {
            kind,
            message,
            diagnostics: unknown,
        })
    }

    fn relation_at(&self, tokens: &[String], pos: usize) -> Option<(usize, RelationType)> {
        self.relations
            .iter()
            .find(|(p, _)| tokens.len() >= pos + p.len() && tokens[pos..pos + p.len()] == p[..])
            .map(|(p, k)| (p.len(), *k))
    }

    fn parse_tokens(&self, tokens: &[String]) -> Result<SubgraphQuery, String> {
        let mut cur = Cursor { tokens, pos: 0 };
        let target = self.noun_phrase(&mut cur)?;
        let mut anchors = Vec::new();
        let mut relations = Vec::new();
        loop {
            let (len, kind) = self
                .relation_at(tokens, cur.pos)
                .ok_or_else(|| format!("expected a relation phrase, found {}", cur.describe()))?;
            cur.pos += len;
            let mut slots = Vec::new();
            for i in 0..kind.anchor_count() {
                if i > 0 {
                    if cur.peek() != Some("and") {
                        return Err(format!(
                            "expected 'and' before the second anchor, found {}",
                            cur.describe()
                        ));
                    }
                    cur.pos += 1;
                }
                slots.push(anchors.len());
                anchors.push(self.noun_phrase(&mut cur)?);
            }
            relations.push(QueryRelation {
                kind,
                anchors: slots,
            });
            match cur.peek() {
                None => break,
                Some("and") => cur.pos += 1,
                Some(_) => return Err(format!("unexpected {}", cur.describe())),
            }
        }
        let query = SubgraphQuery {
            target,
            anchors,
            relations,
        }
        .normalized();
        query.validate().map_err(|e| e.to_string())?;
        Ok(query)
    }

    fn noun_phrase(&self, cur: &mut Cursor) -> Result<QueryNode, String> {
        if cur.peek().is_some_and(|t| DETERMINERS.contains(&t)) {
            cur.pos += 1;
        }
        let mut attributes = BTreeSet::new();
        loop {
            if let Some((len, class)) = self.classes.longest_match(cur.tokens, cur.pos) {
                let phrase = cur.tokens[cur.pos..cur.pos + len].join(" ");
                cur.pos += len;
                let noun = (phrase != display_name(class)).then_some(phrase);
                return Ok(QueryNode {
                    class: class.to_string(),
                    noun,
                    attributes: attributes.into_iter().collect(),
                });
            }
            let word = cur
                .peek()
                .ok_or_else(|| "expected an object class, found end of statement".to_string())?;
            let attr = color_word(word)
                .or_else(|| size_word(word))
                .ok_or_else(|| format!("expected an object class, found {}", cur.describe()))?;
            if !attributes.insert(attr) {
                return Err(format!("repeated attribute {}", cur.describe()));
            }
            cur.pos += 1;
        }
    }
}

/// Parses with a parser built from the given tables.
pub fn parse_statement(
    text: &str,
    synonyms: &SynonymTable,
    classes: &ClassVocabulary,
) -> Result<ParseOutcome, ParseError> {
    Parser::new(synonyms, classes).parse(text)
}
