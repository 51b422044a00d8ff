//! Text primitives shared by every metric: sentence splitting, tokenization,
//! SQuAD-style answer normalization and n-gram bags.
//!
//! Everything here is a pure function of its input. Tokens are compared by
//! exact codepoint equality; callers that ingest external text should pass it
//! through [`nfc`] first so that composed and decomposed forms agree.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("invalid n-gram order {0}: must be at least 1")]
    InvalidN(usize),
}

/// Canonical (NFC) composition of ingested text.
pub fn nfc(text: &str) -> String {
    text.nfc().collect()
}

/// One sentence of a document together with its location in the parent text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub text: String,
    /// 0-based position of the sentence within its document.
    pub index: usize,
    /// Byte offset of `text` inside the parent document.
    pub start: usize,
}

impl Sentence {
    /// Wraps a standalone sentence, e.g. a pre-split summary sentence.
    pub fn new(text: impl Into<String>, index: usize) -> Self {
        Sentence {
            text: text.into(),
            index,
            start: 0,
        }
    }

    pub fn end(&self) -> usize {
        self.start + self.text.len()
    }
}

/// Tokens that end in a period without ending a sentence.
const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "st.", "vs.", "etc.", "e.g.", "i.e.", "u.s.", "u.k.",
];

const CLOSERS: &[char] = &['"', '\'', ')', ']', '\u{201d}', '\u{2019}'];

/// Splits a document into sentences.
///
/// A sentence ends at `.`, `?` or `!` (plus any closing quotes or brackets)
/// when the next non-space character is uppercase. A period that closes one
/// of a fixed set of abbreviations never ends a sentence.
///
/// ```
/// use faithcheck::text::split_sentences;
///
/// let s = split_sentences("Mr. Smith left. He returned.");
/// let texts: Vec<_> = s.iter().map(|s| s.text.as_str()).collect();
/// assert_eq!(texts, ["Mr. Smith left.", "He returned."]);
/// ```
pub fn split_sentences(text: &str) -> Vec<Sentence> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut seg_start = 0usize;
    let mut i = 0usize;

    while i < chars.len() {
        let (pos, c) = chars[i];
        if matches!(c, '.' | '?' | '!') {
            let mut j = i + 1;
            while j < chars.len() && (matches!(chars[j].1, '.' | '?' | '!') || CLOSERS.contains(&chars[j].1)) {
                j += 1;
            }
            let boundary = if j == chars.len() {
                false
            } else {
                let mut k = j;
                while k < chars.len() && chars[k].1.is_whitespace() {
                    k += 1;
                }
                k > j && k < chars.len() && chars[k].1.is_uppercase()
            };
            if boundary && !(c == '.' && ends_with_abbreviation(&text[seg_start..pos + 1])) {
                let end = if j < chars.len() { chars[j].0 } else { text.len() };
                push_sentence(&mut sentences, text, seg_start, end);
                seg_start = end;
            }
            i = j;
            continue;
        }
        i += 1;
    }
    push_sentence(&mut sentences, text, seg_start, text.len());
    sentences
}

fn ends_with_abbreviation(segment: &str) -> bool {
    let last_word = segment
        .rsplit(char::is_whitespace)
        .next()
        .unwrap_or("")
        .trim_start_matches(['"', '\'', '(', '[', '\u{201c}', '\u{2018}']);
    let lowered = last_word.to_lowercase();
    ABBREVIATIONS.contains(&lowered.as_str())
}

fn push_sentence(out: &mut Vec<Sentence>, text: &str, start: usize, end: usize) {
    let raw = &text[start..end];
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return;
    }
    let lead = raw.len() - raw.trim_start().len();
    out.push(Sentence {
        text: trimmed.to_string(),
        index: out.len(),
        start: start + lead,
    });
}

/// An ordered sequence of lowercase tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSeq(pub Vec<String>);

impl TokenSeq {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }
}

impl fmt::Display for TokenSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenSeq(iter.into_iter().map(Into::into).collect())
    }
}

impl From<Vec<&str>> for TokenSeq {
    fn from(v: Vec<&str>) -> Self {
        v.into_iter().collect()
    }
}

/// A token with its original casing and byte range in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub start: usize,
    pub end: usize,
}

impl Token<'_> {
    pub fn is_word(&self) -> bool {
        self.text.chars().next().is_some_and(is_word_char)
    }

    pub fn is_capitalized(&self) -> bool {
        self.text.chars().next().is_some_and(char::is_uppercase)
    }

    pub fn is_numeric(&self) -> bool {
        self.text.chars().next().is_some_and(|c| c.is_ascii_digit())
            && self.text.chars().all(|c| c.is_ascii_digit() || c == ',' || c == '.')
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_combining_mark(c)
}

/// Tokenizes while keeping original casing and byte offsets.
///
/// Runs of letters and digits form one token; every other non-space
/// character is a token of its own, except a `,` or `.` sitting between two
/// digits, which stays inside the number (`60,000`, `3.5`).
pub fn tokenize_spans<'a>(text: &'a str) -> Vec<Token<'a>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut word_start: Option<usize> = None;

    let flush = |tokens: &mut Vec<Token<'a>>, start: &mut Option<usize>, end: usize| {
        if let Some(s) = start.take() {
            tokens.push(Token {
                text: &text[s..end],
                start: s,
                end,
            });
        }
    };

    for (i, &(pos, c)) in chars.iter().enumerate() {
        if is_word_char(c) {
            if word_start.is_none() {
                word_start = Some(pos);
            }
            continue;
        }
        if matches!(c, ',' | '.') && word_start.is_some() {
            let prev_digit = i > 0 && chars[i - 1].1.is_ascii_digit();
            let next_digit = chars.get(i + 1).is_some_and(|&(_, n)| n.is_ascii_digit());
            if prev_digit && next_digit {
                continue;
            }
        }
        flush(&mut tokens, &mut word_start, pos);
        if !c.is_whitespace() {
            tokens.push(Token {
                text: &text[pos..pos + c.len_utf8()],
                start: pos,
                end: pos + c.len_utf8(),
            });
        }
    }
    flush(&mut tokens, &mut word_start, text.len());
    tokens
}

/// Lowercase tokenization used by every overlap computation.
///
/// ```
/// use faithcheck::text::tokenize;
///
/// assert_eq!(tokenize("almost 60,000 followers").0, ["almost", "60,000", "followers"]);
/// assert_eq!(tokenize("The plane landed.").0, ["the", "plane", "landed", "."]);
/// ```
pub fn tokenize(text: &str) -> TokenSeq {
    TokenSeq(
        tokenize_spans(text)
            .into_iter()
            .map(|t| t.text.to_lowercase())
            .collect(),
    )
}

const ARTICLES: &[&str] = &["a", "an", "the"];

/// SQuAD answer normalization: lowercase, drop punctuation, drop the
/// articles `a`/`an`/`the`, split on whitespace.
pub fn normalize_answer(text: &str) -> TokenSeq {
    let lowered = text.to_lowercase();
    let stripped: String = lowered
        .chars()
        .filter(|&c| c.is_whitespace() || is_word_char(c))
        .collect();
    stripped
        .split_whitespace()
        .filter(|w| !ARTICLES.contains(w))
        .collect()
}

/// A multiset of n-grams of a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramBag {
    n: usize,
    counts: HashMap<Vec<String>, usize>,
}

impl NGramBag {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn count(&self, gram: &[String]) -> usize {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    pub fn contains(&self, gram: &[String]) -> bool {
        self.counts.contains_key(gram)
    }

    /// Total number of n-gram occurrences (not distinct types).
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[String], usize)> {
        self.counts.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    /// Size of the multiset intersection (counts clipped to the smaller side).
    pub fn overlap(&self, other: &NGramBag) -> usize {
        let (small, large) = if self.counts.len() <= other.counts.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .counts
            .iter()
            .map(|(g, &c)| c.min(large.count(g)))
            .sum()
    }
}

/// Counts all n-grams of order `n`.
pub fn ngrams(tokens: &[String], n: usize) -> Result<NGramBag, TextError> {
    if n == 0 {
        return Err(TextError::InvalidN(n));
    }
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w.to_vec()).or_insert(0) += 1;
        }
    }
    Ok(NGramBag { n, counts })
}

/// Joins tokens back into readable text: no space before closing
/// punctuation, no space after opening brackets.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    let mut glue_next = false;
    for tok in tokens {
        let t = tok.as_ref();
        let closing = matches!(t, "," | "." | ";" | ":" | "?" | "!" | ")" | "]" | "%" | "'s");
        if !out.is_empty() && !closing && !glue_next {
            out.push(' ');
        }
        out.push_str(t);
        glue_next = matches!(t, "(" | "[" | "$" | "£" | "€");
    }
    out
}
