//! Statement text to subgraph queries: a deterministic grammar parser and
//! an optional external parsing service.

mod external;
mod grammar;
mod vocabulary;

pub use external::{external_parse, few_shot_examples, FewShotExample};
pub use grammar::{parse_statement, Confidence, ParseError, ParseErrorKind, ParseOutcome, Parser};
pub use vocabulary::{tokenize, ClassVocabulary};
