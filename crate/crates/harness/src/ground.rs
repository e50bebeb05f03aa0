//! Statement grounding shared by the benchmark and the HTTP service:
//! parse, search, and suggest alternatives when nothing matches.

use refground_core::external::JsonEndpoint;
use refground_core::graph::SceneGraph;
use refground_core::grounding::{
    classify_existence, external_choice, partial_matches, select_heuristic, AlternativeCandidate,
    AspectWeights, MCQA_POOL,
};
use refground_core::language::SynonymTable;
use refground_core::parser::{
    external_parse, few_shot_examples, Confidence, ParseError, ParseOutcome, Parser,
};

#[derive(Debug, Clone)]
pub struct Grounding {
    pub parse: ParseOutcome,
    pub exists: bool,
    pub object_id: Option<String>,
    pub anchor_ids: Vec<String>,
    /// Best-first, at most the multiple-choice pool size. Empty when the
    /// statement matched.
    pub alternatives: Vec<AlternativeCandidate>,
    pub selected: Option<AlternativeCandidate>,
}

pub struct Grounder {
    parser: Parser,
    synonyms: SynonymTable,
    weights: AspectWeights,
    external_parser: Option<Box<dyn JsonEndpoint>>,
    external_selector: Option<Box<dyn JsonEndpoint>>,
}

impl Grounder {
    pub fn new(weights: AspectWeights) -> Self {
        Grounder {
            parser: Parser::default(),
            synonyms: SynonymTable::default(),
            weights,
            external_parser: None,
            external_selector: None,
        }
    }

    pub fn with_external_parser(mut self, endpoint: Box<dyn JsonEndpoint>) -> Self {
        self.external_parser = Some(endpoint);
        self
    }

    pub fn with_external_selector(mut self, endpoint: Box<dyn JsonEndpoint>) -> Self {
        self.external_selector = Some(endpoint);
        self
    }

    pub fn parser_mode(&self) -> &'static str {
        if self.external_parser.is_some() {
            "external"
        } else {
            "grammar"
        }
    }

    pub fn selector_mode(&self) -> &'static str {
        if self.external_selector.is_some() {
            "external"
        } else {
            "heuristic"
        }
    }

    /// External parse when configured, falling back to the grammar on any
    /// failure.
    pub fn parse(&self, text: &str) -> Result<ParseOutcome, ParseError> {
        if let Some(endpoint) = &self.external_parser {
            match external_parse(endpoint.as_ref(), text, few_shot_examples()) {
                Ok(query) => {
                    return Ok(ParseOutcome {
                        query,
                        confidence: Confidence::External,
                        diagnostics: Vec::new(),
                    })
                }
                Err(e) => log::warn!("external parse of '{text}' failed, using grammar: {e}"),
            }
        }
        self.parser.parse(text)
    }

    pub fn ground(&self, graph: &SceneGraph, text: &str) -> Result<Grounding, ParseError> {
        let parse = self.parse(text)?;
        Ok(self.ground_query(graph, text, parse))
    }

    pub fn ground_query(&self, graph: &SceneGraph, text: &str, parse: ParseOutcome) -> Grounding {
        let existence = classify_existence(graph, &parse.query);
        if let Some(m) = existence.first {
            return Grounding {
                parse,
                exists: true,
                object_id: Some(m.target),
                anchor_ids: m.anchors,
                alternatives: Vec::new(),
                selected: None,
            };
        }
        let mut candidates = partial_matches(graph, &parse.query, &self.weights, &self.synonyms);
        let selected = self.select(text, &candidates);
        candidates.truncate(MCQA_POOL);
        Grounding {
            parse,
            exists: false,
            object_id: None,
            anchor_ids: Vec::new(),
            alternatives: candidates,
            selected,
        }
    }

    fn select(
        &self,
        text: &str,
        candidates: &[AlternativeCandidate],
    ) -> Option<AlternativeCandidate> {
        if let Some(endpoint) = &self.external_selector {
            let pool = &candidates[..candidates.len().min(MCQA_POOL)];
            if !pool.is_empty() {
                let choices: Vec<String> = pool.iter().map(|c| c.statement.clone()).collect();
                match external_choice(endpoint.as_ref(), text, &choices) {
                    Ok(i) => return Some(pool[i].clone()),
                    Err(e) => log::warn!("external selection failed, using heuristic: {e}"),
                }
            }
        }
        select_heuristic(candidates).cloned()
    }
}
