//! Question-answering based faithfulness.
//!
//! For each summary sentence: extract answer spans, turn each masked span
//! into a question, answer the question against the source document and
//! compare the answer with the masked span by token F1. The sentence score is
//! the mean F1 over its questions.
//!
//! ```
//! use faithcheck::feqa::{feqa_score, FeqaConfig, LexicalBackend};
//! use faithcheck::text::Sentence;
//!
//! let document = "The weather was mild. Sally was born in 1958 in a small town.";
//! let faithful = Sentence::new("Sally was born in 1958.", 0);
//! let score = feqa_score(&faithful, document, &LexicalBackend::default(), FeqaConfig::default()).unwrap();
//! assert_eq!(score.score(), Some(1.0));
//! ```

mod backend;
pub(crate) mod lexicon;
mod question;
mod remote;
mod score;
mod spans;

pub use backend::{BackendError, LexicalBackend, QaAnswer, QaBackend};
pub use question::{generate_question, GenerationError, QaPair, QuestionGenerator, RuleBasedGenerator};
pub use remote::{parse_answer, AnswerRequest, RemoteBackend};
pub use score::{feqa_score, token_f1, FaithfulnessScore, Feqa, FeqaConfig, QuestionOutcome, ScoreStatus};
pub use spans::{extract_answer_spans, AnswerSpan, AnswerType, HeuristicChunker, SpanExtractor, DEFAULT_MAX_SPANS};
