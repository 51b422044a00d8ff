//! Rule-based declarative-to-question transformation.
//!
//! A mask in subject position (before the first verb) is replaced in place
//! by its wh-phrase. Any other mask is fronted: the wh-phrase goes first,
//! followed by the auxiliary (or `do`/`does`/`did` with the verb reduced to
//! its base form), the subject and the rest of the predicate without the
//! masked tokens.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::lexicon::{
    is_function_word, is_participle, is_past_form, lemmatize_verb, AUX_BE, AUX_DO, AUX_HAVE,
    MODALS, NUMBER_WORDS, SPAN_MODIFIERS,
};
use super::spans::{AnswerSpan, AnswerType};
use crate::text::{detokenize, normalize_answer, tokenize_spans, Sentence};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerationError {
    #[error("span {start}..{end} is outside a sentence of {len} tokens")]
    SpanOutOfRange { start: usize, end: usize, len: usize },
    #[error("no verb found to anchor the question")]
    NoVerb,
    #[error("generated question would reveal the answer")]
    AnswerLeak,
    #[error("generated question is degenerate")]
    Degenerate,
}

/// A generated question and the summary span it asks about.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QaPair {
    pub question: String,
    pub gold_answer: AnswerSpan,
    /// The declarative sentence the question was generated from.
    pub source_sentence: String,
}

pub trait QuestionGenerator: Send + Sync {
    fn generate(&self, sentence: &Sentence, span: &AnswerSpan) -> Result<QaPair, GenerationError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RuleBasedGenerator;

impl QuestionGenerator for RuleBasedGenerator {
    fn generate(&self, sentence: &Sentence, span: &AnswerSpan) -> Result<QaPair, GenerationError> {
        generate_question(sentence, span)
    }
}

const TRAILING_PUNCT: &[&str] = &[".", "!", "?", ";", ":", ",", "\"", "'", "\u{201d}"];
const NEGATION_AND_ADVERBS: &[&str] = &["not", "never", "already", "just", "also", "recently", "since", "now"];
const DROPPABLE_PREPOSITIONS: &[&str] = &["in", "on", "at", "during", "into"];

fn wh_phrase(span: &AnswerSpan, lower: &[String]) -> Vec<String> {
    let words = |ws: &[&str]| ws.iter().map(|w| w.to_string()).collect::<Vec<_>>();
    match span.answer_type {
        AnswerType::Person => words(&["who"]),
        AnswerType::Date => words(&["when"]),
        AnswerType::Duration => words(&["how", "long"]),
        AnswerType::Location => words(&["where"]),
        AnswerType::Entity | AnswerType::Phrase => words(&["what"]),
        AnswerType::Number => {
            let covered = &lower[span.start..span.end];
            if covered.iter().any(|t| matches!(t.as_str(), "$" | "£" | "€")) {
                words(&["how", "much"])
            } else if covered.last().is_some_and(|t| t == "%") {
                words(&["what", "percentage"])
            } else {
                let last = covered.last().map(String::as_str).unwrap_or("");
                let unit = covered.len() > 1
                    && last.chars().all(char::is_alphabetic)
                    && !NUMBER_WORDS.contains(&last);
                let mut out = words(&["how", "many"]);
                if unit {
                    out.push(last.to_string());
                }
                out
            }
        }
    }
}

fn capitalize(w: &str) -> String {
    let mut chars = w.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn is_verb_anchor(lower: &[String], i: usize) -> bool {
    let w = lower[i].as_str();
    if AUX_BE.contains(&w) || AUX_HAVE.contains(&w) || AUX_DO.contains(&w) || MODALS.contains(&w) {
        return true;
    }
    if is_past_form(w) {
        return true;
    }
    // Third-person present: "Sally likes", "the dog eats", not "the dogs".
    w.len() > 2
        && w.ends_with('s')
        && !w.ends_with("ss")
        && w.chars().all(char::is_alphabetic)
        && !is_function_word(w)
        && i > 0
        && !super::lexicon::DETERMINERS.contains(&lower[i - 1].as_str())
        && !is_function_word(&lower[i - 1])
}

/// Turns a declarative sentence and a masked span into a question.
///
/// ```
/// use faithcheck::feqa::{extract_answer_spans, generate_question};
/// use faithcheck::text::Sentence;
///
/// let sentence = Sentence::new("Sally was born in 1958", 0);
/// let year = extract_answer_spans(&sentence, 10).pop().unwrap();
/// assert_eq!(generate_question(&sentence, &year).unwrap().question, "When was Sally born?");
/// ```
pub fn generate_question(sentence: &Sentence, span: &AnswerSpan) -> Result<QaPair, GenerationError> {
    let tokens = tokenize_spans(&sentence.text);
    let lower: Vec<String> = tokens.iter().map(|t| t.text.to_lowercase()).collect();
    if span.start >= span.end || span.end > tokens.len() {
        return Err(GenerationError::SpanOutOfRange {
            start: span.start,
            end: span.end,
            len: tokens.len(),
        });
    }

    let mut body_end = tokens.len();
    while body_end > span.end && TRAILING_PUNCT.contains(&lower[body_end - 1].as_str()) {
        body_end -= 1;
    }

    let verb = (1..body_end)
        .filter(|&i| i < span.start || i >= span.end)
        .find(|&i| is_verb_anchor(&lower, i))
        .ok_or(GenerationError::NoVerb)?;

    let text = |i: usize| tokens[i].text.to_string();
    let mut wh = wh_phrase(span, &lower);
    let mut pieces: Vec<String> = Vec::new();

    if span.end <= verb {
        if span.start == 0 {
            wh[0] = capitalize(&wh[0]);
        }
        pieces.extend((0..span.start).map(text));
        pieces.extend(wh);
        pieces.extend((span.end..body_end).map(text));
    } else {
        let w = lower[verb].as_str();
        let perfect = AUX_HAVE.contains(&w)
            && (verb + 1..body_end)
                .find(|&i| !NEGATION_AND_ADVERBS.contains(&lower[i].as_str()))
                .is_some_and(|i| is_participle(&lower[i]));
        let (aux, main_lemma) = if AUX_BE.contains(&w) || MODALS.contains(&w) || AUX_DO.contains(&w) || perfect {
            (w.to_string(), None)
        } else if is_past_form(w) {
            ("did".to_string(), Some(lemmatize_verb(w)))
        } else if w.ends_with('s') && !w.ends_with("ss") {
            ("does".to_string(), Some(lemmatize_verb(w)))
        } else {
            ("do".to_string(), Some(w.to_string()))
        };

        let mut dropped = vec![false; tokens.len()];
        let mut k = span.start;
        while k > verb + 1 && SPAN_MODIFIERS.contains(&lower[k - 1].as_str()) {
            dropped[k - 1] = true;
            k -= 1;
        }
        let drops_preposition = matches!(span.answer_type, AnswerType::Date | AnswerType::Location);
        if drops_preposition && k > verb + 1 && DROPPABLE_PREPOSITIONS.contains(&lower[k - 1].as_str()) {
            dropped[k - 1] = true;
        }

        let mut subject: Vec<String> = (0..verb).map(text).collect();
        while subject.last().is_some_and(|t| TRAILING_PUNCT.contains(&t.as_str())) {
            subject.pop();
        }
        if subject.is_empty() {
            return Err(GenerationError::Degenerate);
        }
        if is_function_word(&lower[0]) && lower[0] != "i" {
            subject[0] = lower[0].clone();
        }

        wh[0] = capitalize(&wh[0]);
        pieces.extend(wh);
        pieces.push(aux);
        pieces.extend(subject);
        if let Some(lemma) = main_lemma {
            pieces.push(lemma);
        }
        pieces.extend(
            (verb + 1..body_end)
                .filter(|&i| !(span.start..span.end).contains(&i) && !dropped[i])
                .map(text),
        );
    }

    while pieces.last().is_some_and(|t| TRAILING_PUNCT.contains(&t.as_str())) {
        pieces.pop();
    }
    let words = pieces.iter().filter(|p| p.chars().any(char::is_alphanumeric)).count();
    if words < 2 {
        return Err(GenerationError::Degenerate);
    }
    pieces.push("?".to_string());
    let question = detokenize(&pieces);

    let gold = normalize_answer(&span.text);
    if gold.is_empty() {
        return Err(GenerationError::Degenerate);
    }
    let asked = normalize_answer(&question);
    if gold.iter().all(|g| asked.iter().any(|q| q == g)) {
        return Err(GenerationError::AnswerLeak);
    }

    Ok(QaPair {
        question,
        gold_answer: span.clone(),
        source_sentence: sentence.text.clone(),
    })
}
