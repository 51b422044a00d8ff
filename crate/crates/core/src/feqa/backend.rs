//! Question-answering backends.
//!
//! [`LexicalBackend`] is a transparent, deterministic reader used by default
//! and throughout the test suite. [`RemoteBackend`](super::remote::RemoteBackend)
//! forwards questions to an HTTP service that hosts a pretrained reader.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::lexicon::{is_function_word, match_key, WH_WORDS};
use super::spans::{extract_answer_spans, AnswerSpan, AnswerType};
use crate::text::{split_sentences, tokenize, tokenize_spans, Sentence};

/// Answer returned by a backend. `answer` is empty iff `unanswerable`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaAnswer {
    pub answer: String,
    pub unanswerable: bool,
    pub confidence: f64,
}

impl QaAnswer {
    pub fn unanswerable() -> Self {
        QaAnswer {
            answer: String::new(),
            unanswerable: true,
            confidence: 0.0,
        }
    }

    /// Checks the protocol invariants.
    pub fn validate(&self) -> Result<(), BackendError> {
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(BackendError::MalformedResponse(format!(
                "confidence {} outside [0, 1]",
                self.confidence
            )));
        }
        if self.answer.is_empty() != self.unanswerable {
            return Err(BackendError::MalformedResponse(
                "answer must be empty exactly when unanswerable".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BackendError {
    #[error("QA backend unavailable: {0}")]
    Unavailable(String),
    #[error("malformed QA backend response: {0}")]
    MalformedResponse(String),
}

impl BackendError {
    /// Short status tag used in reports.
    pub fn tag(&self) -> &'static str {
        match self {
            BackendError::Unavailable(_) => "backend-unavailable",
            BackendError::MalformedResponse(_) => "malformed-response",
        }
    }
}

pub trait QaBackend: Send + Sync {
    fn answer(&self, question: &str, context: &str) -> Result<QaAnswer, BackendError>;
}

/// Overlap-based extractive reader.
///
/// The question is unanswerable unless some context sentence shares at least
/// [`min_overlap`](Self::min_overlap) content words with it. Otherwise
/// sentences are visited by shared content words (ties go to the earliest)
/// and the answer is the first span whose type the wh-word asks for, trying
/// exact types across all sentences before merely compatible ones. Within a
/// sentence, the span whose surrounding words best match the question wins.
#[derive(Debug, Clone)]
pub struct LexicalBackend {
    pub min_overlap: usize,
    /// Tokens on each side of a candidate counted as its context.
    pub context_window: usize,
}

impl Default for LexicalBackend {
    fn default() -> Self {
        LexicalBackend {
            min_overlap: 2,
            context_window: 3,
        }
    }
}

fn content_keys<'a>(tokens: impl IntoIterator<Item = &'a String>) -> HashSet<String> {
    tokens
        .into_iter()
        .filter(|t| t.chars().any(char::is_alphanumeric) && !is_function_word(t))
        .map(|t| match_key(t))
        .collect()
}

/// Answer types a question asks for, best match first.
fn expected_types(question_tokens: &[String]) -> (Vec<AnswerType>, Vec<AnswerType>) {
    use AnswerType::*;
    let wh = question_tokens
        .iter()
        .position(|t| WH_WORDS.contains(&t.as_str()));
    let Some(i) = wh else {
        return (vec![Phrase, Entity], vec![Person, Location]);
    };
    match question_tokens[i].as_str() {
        "who" | "whom" | "whose" => (vec![Person], vec![Entity]),
        "when" => (vec![Date], vec![]),
        "where" => (vec![Location], vec![Entity]),
        "how" => match question_tokens.get(i + 1).map(String::as_str) {
            Some("long") => (vec![Duration], vec![Date]),
            Some("many") | Some("much") => (vec![Number], vec![Duration]),
            _ => (vec![Phrase, Entity], vec![]),
        },
        _ => {
            if question_tokens.get(i + 1).is_some_and(|t| t == "percentage") {
                (vec![Number], vec![])
            } else {
                (vec![Phrase, Entity], vec![Person, Location])
            }
        }
    }
}

fn contains_run(haystack: &[String], needle: &[String]) -> bool {
    !needle.is_empty() && needle.len() <= haystack.len() && haystack.windows(needle.len()).any(|w| w == needle)
}

impl QaBackend for LexicalBackend {
    fn answer(&self, question: &str, context: &str) -> Result<QaAnswer, BackendError> {
        let q_tokens = tokenize(question).0;
        let q_keys = content_keys(&q_tokens);
        if q_keys.is_empty() {
            return Ok(QaAnswer::unanswerable());
        }

        let mut ranked: Vec<(usize, Sentence)> = split_sentences(context)
            .into_iter()
            .map(|sentence| {
                let keys = content_keys(&tokenize(&sentence.text).0);
                (q_keys.intersection(&keys).count(), sentence)
            })
            .filter(|(overlap, _)| *overlap > 0)
            .collect();
        ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.index.cmp(&b.1.index)));
        if ranked.first().map_or(true, |(overlap, _)| *overlap < self.min_overlap) {
            return Ok(QaAnswer::unanswerable());
        }

        let (exact, compatible) = expected_types(&q_tokens);
        for types in [&exact, &compatible] {
            for (overlap, sentence) in &ranked {
                if let Some(span) = self.best_span(sentence, &q_tokens, &q_keys, types) {
                    return Ok(QaAnswer {
                        answer: span.text,
                        unanswerable: false,
                        confidence: (*overlap as f64 / q_keys.len() as f64).clamp(0.0, 1.0),
                    });
                }
            }
        }
        Ok(QaAnswer::unanswerable())
    }
}

impl LexicalBackend {
    fn best_span(
        &self,
        sentence: &Sentence,
        q_tokens: &[String],
        q_keys: &HashSet<String>,
        types: &[AnswerType],
    ) -> Option<AnswerSpan> {
        let s_lower: Vec<String> = tokenize_spans(&sentence.text)
            .iter()
            .map(|t| t.text.to_lowercase())
            .collect();
        extract_answer_spans(sentence, usize::MAX)
            .into_iter()
            .filter_map(|span| {
                if !types.contains(&span.answer_type) || contains_run(q_tokens, &s_lower[span.start..span.end]) {
                    return None;
                }
                let lo = span.start.saturating_sub(self.context_window);
                let hi = (span.end + self.context_window).min(s_lower.len());
                let around = s_lower[lo..span.start].iter().chain(&s_lower[span.end..hi]);
                let context_hits = content_keys(around).intersection(q_keys).count();
                Some((std::cmp::Reverse(context_hits), span.start, span))
            })
            .min_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)))
            .map(|(.., span)| span)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ask(q: &str, ctx: &str) -> QaAnswer {
        LexicalBackend::default().answer(q, ctx).unwrap()
    }

    #[test]
    fn empty_context_is_unanswerable() {
        let a = ask("When was Sally born?", "");
        assert!(a.unanswerable);
        assert!(a.answer.is_empty());
        a.validate().unwrap();
    }

    #[test]
    fn single_candidate_is_returned() {
        let ctx = "The weather was mild. Sally was born in 1958 in a small town. She moved away.";
        let a = ask("When was Sally born?", ctx);
        assert_eq!(a.answer, "1958");
        assert!(!a.unanswerable);
        a.validate().unwrap();
    }

    #[test]
    fn person_question_from_the_football_example() {
        let ctx = "Burnley face Spurs on Sunday. However, Winger Ross Wallace (knee) and right-back Steven Reid (calf) could return for the Barclays premier league contest. Tickets are sold out.";
        let a = ask("Who and Steven Reid could return for the premier league match?", ctx);
        assert_eq!(a.answer, "Ross Wallace");
    }

    #[test]
    fn low_overlap_is_unanswerable() {
        let a = ask("Who painted the bridge?", "The cat slept. Rain fell in Paris.");
        assert!(a.unanswerable);
    }

    #[test]
    fn spans_already_in_question_are_skipped() {
        let a = ask("What did the dog eat?", "The dog ate the cake.");
        assert_eq!(a.answer, "the cake");
    }

    #[test]
    fn validation_rejects_inconsistent_answers() {
        let bad = QaAnswer {
            answer: String::new(),
            unanswerable: false,
            confidence: 0.5,
        };
        assert!(bad.validate().is_err());
        let bad = QaAnswer {
            answer: "x".into(),
            unanswerable: false,
            confidence: 1.5,
        };
        assert!(bad.validate().is_err());
    }
}
