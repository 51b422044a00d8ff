//! Heuristic answer-span chunker.
//!
//! Stands in for a constituency parser plus NER. Scanning left to right, the
//! first rule that fires at a position claims the span:
//! dates, durations, numbers, capitalized name runs, determiner-led noun
//! phrases. Spans therefore never overlap.

use serde::{Deserialize, Serialize};

use super::lexicon::{
    is_auxiliary, is_function_word, is_past_form, DETERMINERS, LOCATIVE_PREPOSITIONS, MONTHS,
    NUMBER_WORDS, ORG_KEYWORDS, ROLE_NOUNS, TIME_UNITS, TITLES, WEEKDAYS,
};
use crate::text::{tokenize_spans, Sentence, Token};

pub const DEFAULT_MAX_SPANS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerType {
    Person,
    Date,
    Duration,
    Number,
    Location,
    Entity,
    Phrase,
}

/// A maskable span of a sentence, addressed by token indices `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnswerSpan {
    pub text: String,
    pub start: usize,
    pub end: usize,
    pub answer_type: AnswerType,
}

/// Source of answer spans. The heuristic chunker is the default; parser or
/// NER output can be plugged in through this trait.
pub trait SpanExtractor: Send + Sync {
    fn extract(&self, sentence: &Sentence, max_spans: usize) -> Vec<AnswerSpan>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicChunker;

impl SpanExtractor for HeuristicChunker {
    fn extract(&self, sentence: &Sentence, max_spans: usize) -> Vec<AnswerSpan> {
        extract_answer_spans(sentence, max_spans)
    }
}

/// Finds up to `max_spans` non-overlapping answer spans, left to right.
///
/// ```
/// use faithcheck::feqa::{extract_answer_spans, AnswerType};
/// use faithcheck::text::Sentence;
///
/// let spans = extract_answer_spans(&Sentence::new("Sally was born in 1958", 0), 10);
/// let found: Vec<_> = spans.iter().map(|s| (s.text.as_str(), s.answer_type)).collect();
/// assert_eq!(found, [("Sally", AnswerType::Person), ("1958", AnswerType::Date)]);
/// ```
pub fn extract_answer_spans(sentence: &Sentence, max_spans: usize) -> Vec<AnswerSpan> {
    let tokens = tokenize_spans(&sentence.text);
    let chunker = Chunker {
        text: &sentence.text,
        tokens: &tokens,
        lower: tokens.iter().map(|t| t.text.to_lowercase()).collect(),
    };
    let mut spans = Vec::new();
    let mut i = 0;
    while i < tokens.len() && spans.len() < max_spans {
        let hit = chunker
            .date_at(i)
            .or_else(|| chunker.duration_at(i))
            .or_else(|| chunker.number_at(i))
            .or_else(|| chunker.name_at(i))
            .or_else(|| chunker.phrase_at(i));
        match hit {
            Some(span) => {
                i = span.end;
                spans.push(span);
            }
            None => i += 1,
        }
    }
    spans
}

struct Chunker<'a> {
    text: &'a str,
    tokens: &'a [Token<'a>],
    lower: Vec<String>,
}

impl Chunker<'_> {
    fn span(&self, start: usize, end: usize, answer_type: AnswerType) -> AnswerSpan {
        AnswerSpan {
            text: self.text[self.tokens[start].start..self.tokens[end - 1].end].to_string(),
            start,
            end,
            answer_type,
        }
    }

    fn lower(&self, i: usize) -> Option<&str> {
        self.lower.get(i).map(String::as_str)
    }

    fn is_year(&self, i: usize) -> bool {
        let Some(t) = self.tokens.get(i) else { return false };
        t.text.len() == 4 && t.text.chars().all(|c| c.is_ascii_digit()) && {
            let y: u32 = t.text.parse().unwrap_or(0);
            (1000..=2100).contains(&y)
        }
    }

    fn is_day(&self, i: usize) -> bool {
        let Some(t) = self.tokens.get(i) else { return false };
        let digits: String = t.text.chars().take_while(char::is_ascii_digit).collect();
        let suffix = &t.text[digits.len()..];
        (1..=2).contains(&digits.len())
            && matches!(suffix, "" | "st" | "nd" | "rd" | "th")
            && digits.parse::<u32>().is_ok_and(|d| (1..=31).contains(&d))
    }

    fn is_month(&self, i: usize) -> bool {
        self.tokens.get(i).is_some_and(|t| t.is_capitalized())
            && self.lower(i).is_some_and(|w| MONTHS.contains(&w))
    }

    fn is_count(&self, i: usize) -> bool {
        self.tokens.get(i).is_some_and(|t| t.is_numeric())
            || self.lower(i).is_some_and(|w| NUMBER_WORDS.contains(&w))
    }

    fn date_at(&self, i: usize) -> Option<AnswerSpan> {
        if self.is_month(i) {
            let mut end = i + 1;
            if self.is_day(end) {
                end += 1;
            }
            if self.lower(end) == Some(",") && self.is_year(end + 1) {
                end += 2;
            } else if self.is_year(end) {
                end += 1;
            }
            return Some(self.span(i, end, AnswerType::Date));
        }
        if self.is_day(i) && self.is_month(i + 1) {
            let end = if self.is_year(i + 2) { i + 3 } else { i + 2 };
            return Some(self.span(i, end, AnswerType::Date));
        }
        if self.tokens[i].is_capitalized() && self.lower(i).is_some_and(|w| WEEKDAYS.contains(&w)) {
            return Some(self.span(i, i + 1, AnswerType::Date));
        }
        if self.is_year(i) {
            return Some(self.span(i, i + 1, AnswerType::Date));
        }
        None
    }

    fn duration_at(&self, i: usize) -> Option<AnswerSpan> {
        let unit = self.lower(i + 1)?;
        (self.is_count(i) && TIME_UNITS.contains(&unit)).then(|| self.span(i, i + 2, AnswerType::Duration))
    }

    fn is_unit_noun(&self, i: usize) -> bool {
        let (Some(t), Some(w)) = (self.tokens.get(i), self.lower(i)) else {
            return false;
        };
        t.is_word()
            && !t.is_capitalized()
            && w.chars().all(char::is_alphabetic)
            && !is_function_word(w)
            && !is_past_form(w)
            && !TIME_UNITS.contains(&w)
    }

    fn number_at(&self, i: usize) -> Option<AnswerSpan> {
        let currency = matches!(self.tokens[i].text, "$" | "£" | "€");
        let mut end = if currency { i + 1 } else { i };
        if !self.is_count(end) {
            return None;
        }
        // A capitalized number word mid-sentence belongs to a name.
        if end > 0 && self.tokens[end].is_capitalized() {
            return None;
        }
        end += 1;
        while self.is_count(end) && !self.tokens[end].is_numeric() {
            end += 1;
        }
        if self.lower(end) == Some("%") {
            end += 1;
        } else if !currency && self.is_unit_noun(end) {
            end += 1;
        }
        Some(self.span(i, end, AnswerType::Number))
    }

    fn is_name_token(&self, i: usize) -> bool {
        let (Some(t), Some(w)) = (self.tokens.get(i), self.lower(i)) else {
            return false;
        };
        t.is_word()
            && t.is_capitalized()
            && !is_function_word(w)
            && !MONTHS.contains(&w)
            && !WEEKDAYS.contains(&w)
            && !(i == 0 && is_past_form(w))
    }

    fn name_at(&self, i: usize) -> Option<AnswerSpan> {
        if !self.is_name_token(i) {
            return None;
        }
        let mut end = i + 1;
        loop {
            if self.is_name_token(end) {
                end += 1;
            } else if self.lower(end) == Some(".")
                && self.lower(end - 1).is_some_and(|w| TITLES.contains(&w))
                && self.is_name_token(end + 1)
            {
                end += 2;
            } else if self.lower(end) == Some("of") && self.is_name_token(end + 1) {
                end += 2;
            } else {
                break;
            }
        }
        let mut start = i;
        if end - start > 1 && self.lower(start).is_some_and(|w| ROLE_NOUNS.contains(&w)) {
            start += 1;
        }
        let first = self.lower(start)?;
        let titled = TITLES.contains(&first);
        if titled && end - start == 1 {
            return None;
        }
        let words = &self.lower[start..end];
        let answer_type = if words.iter().any(|w| ORG_KEYWORDS.contains(&w.as_str())) {
            AnswerType::Entity
        } else if start > 0 && self.lower(start - 1).is_some_and(|w| LOCATIVE_PREPOSITIONS.contains(&w)) {
            AnswerType::Location
        } else if titled || end - start >= 2 {
            AnswerType::Person
        } else if start == 0 || self.looks_like_verb(end) {
            AnswerType::Person
        } else {
            AnswerType::Entity
        };
        Some(self.span(start, end, answer_type))
    }

    fn looks_like_verb(&self, i: usize) -> bool {
        self.lower(i)
            .is_some_and(|w| is_auxiliary(w) || is_past_form(w) || (w.ends_with('s') && !w.ends_with("ss") && w.len() > 2 && !is_function_word(w)))
    }

    fn phrase_at(&self, i: usize) -> Option<AnswerSpan> {
        if !self.lower(i).is_some_and(|w| DETERMINERS.contains(&w)) {
            return None;
        }
        let mut end = i + 1;
        while end < self.tokens.len() && end - i <= 5 {
            let t = &self.tokens[end];
            let w = self.lower(end)?;
            let ok = t.is_word()
                && w.chars().all(char::is_alphabetic)
                && !is_function_word(w)
                && !is_past_form(w);
            if !ok {
                break;
            }
            end += 1;
        }
        (end > i + 1).then(|| self.span(i, end, AnswerType::Phrase))
    }
}
