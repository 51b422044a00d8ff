//! Copy-type classification of summary sentences and corpus-level
//! abstractiveness profiles.
//!
//! Each summary sentence gets the first label that applies, in order of
//! increasing abstractiveness:
//!
//! 1. [`LabelKind::SentenceExtraction`]: token-identical to a source sentence.
//! 2. [`LabelKind::SpanExtraction`]: a contiguous run of one source sentence.
//! 3. [`LabelKind::WordExtraction`]: a (non-contiguous) subsequence of one
//!    source sentence.
//! 4. [`LabelKind::PerfectFusion`]: the concatenation of `k` contiguous
//!    fragments taken from at least two different source sentences, where
//!    consecutive fragments from the same sentence keep that sentence's order.
//! 5. [`LabelKind::Other`].
//!
//! Matching happens on lowercase tokens, punctuation included.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Record;
use crate::text::{ngrams, split_sentences, tokenize, TokenSeq};

pub const DEFAULT_K_MAX: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbstractivenessError {
    #[error("summary sentence has no tokens")]
    EmptySummarySentence,
    #[error("no source sentences to compare against")]
    NoSources,
    #[error("k_max must be at least 2, got {0}")]
    InvalidKMax(usize),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("record {record}: {source}")]
    Record {
        record: String,
        #[source]
        source: Box<AbstractivenessError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    SentenceExtraction,
    SpanExtraction,
    WordExtraction,
    PerfectFusion,
    Other,
}

impl LabelKind {
    pub const ALL: [LabelKind; 5] = [
        LabelKind::SentenceExtraction,
        LabelKind::SpanExtraction,
        LabelKind::WordExtraction,
        LabelKind::PerfectFusion,
        LabelKind::Other,
    ];
}

/// A contiguous token range `[start, end)` of source sentence `sentence`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SourceSpan {
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractivenessLabel {
    pub kind: LabelKind,
    /// Number of fragments; set only for perfect fusion.
    pub k: Option<usize>,
    pub evidence: Vec<SourceSpan>,
}

impl AbstractivenessLabel {
    fn new(kind: LabelKind, evidence: Vec<SourceSpan>) -> Self {
        AbstractivenessLabel {
            kind,
            k: None,
            evidence,
        }
    }
}

/// Classifies one tokenized summary sentence against tokenized source sentences.
pub fn classify_sentence(
    summary: &TokenSeq,
    sources: &[TokenSeq],
    k_max: usize,
) -> Result<AbstractivenessLabel, AbstractivenessError> {
    if summary.is_empty() {
        return Err(AbstractivenessError::EmptySummarySentence);
    }
    if sources.is_empty() {
        return Err(AbstractivenessError::NoSources);
    }
    if k_max < 2 {
        return Err(AbstractivenessError::InvalidKMax(k_max));
    }
    let s = summary.as_slice();

    if let Some(i) = sources.iter().position(|src| src.as_slice() == s) {
        return Ok(AbstractivenessLabel::new(
            LabelKind::SentenceExtraction,
            vec![SourceSpan {
                sentence: i,
                start: 0,
                end: s.len(),
            }],
        ));
    }

    for (i, src) in sources.iter().enumerate() {
        if let Some(start) = find_contiguous(src.as_slice(), s) {
            return Ok(AbstractivenessLabel::new(
                LabelKind::SpanExtraction,
                vec![SourceSpan {
                    sentence: i,
                    start,
                    end: start + s.len(),
                }],
            ));
        }
    }

    for (i, src) in sources.iter().enumerate() {
        if let Some(runs) = subsequence_runs(src.as_slice(), s) {
            let evidence = runs
                .into_iter()
                .map(|(start, end)| SourceSpan {
                    sentence: i,
                    start,
                    end,
                })
                .collect();
            return Ok(AbstractivenessLabel::new(LabelKind::WordExtraction, evidence));
        }
    }

    if let Some(fragments) = fusion_fragments(summary, sources, k_max) {
        return Ok(AbstractivenessLabel {
            kind: LabelKind::PerfectFusion,
            k: Some(fragments.len()),
            evidence: fragments,
        });
    }

    Ok(AbstractivenessLabel::new(LabelKind::Other, Vec::new()))
}

fn find_contiguous(haystack: &[String], needle: &[String]) -> Option<usize> {
    if needle.len() > haystack.len() {
        return None;
    }
    haystack.windows(needle.len()).position(|w| w == needle)
}

/// Greedy leftmost subsequence match, returned as maximal runs of adjacent
/// source positions.
fn subsequence_runs(source: &[String], summary: &[String]) -> Option<Vec<(usize, usize)>> {
    let mut positions = Vec::with_capacity(summary.len());
    let mut from = 0;
    for tok in summary {
        let off = source[from..].iter().position(|t| t == tok)?;
        positions.push(from + off);
        from += off + 1;
    }
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for p in positions {
        match runs.last_mut() {
            Some(run) if run.1 == p => run.1 = p + 1,
            _ => runs.push((p, p + 1)),
        }
    }
    Some(runs)
}

/// Minimal number of fragments in a perfect fusion, if one exists with at
/// most `k_max` fragments.
///
/// ```
/// use faithcheck::abstractiveness::detect_perfect_fusion;
/// use faithcheck::text::TokenSeq;
///
/// let summary: TokenSeq = vec!["a", "b", "c", "d"].into();
/// let sources: Vec<TokenSeq> = vec![vec!["a", "b", "x"].into(), vec!["y", "c", "d"].into()];
/// assert_eq!(detect_perfect_fusion(&summary, &sources, 4), Some(2));
/// ```
pub fn detect_perfect_fusion(summary: &TokenSeq, sources: &[TokenSeq], k_max: usize) -> Option<usize> {
    fusion_fragments(summary, sources, k_max).map(|f| f.len())
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct FusionState {
    pos: usize,
    last_sentence: usize,
    last_end: usize,
    mixed: bool,
}

/// Breadth-first search over fragment counts. A state records how much of the
/// summary is covered, where the last fragment ended (needed for the
/// same-sentence ordering rule) and whether two sentences have been used.
/// The first level that reaches a complete, mixed cover gives the minimal k.
pub fn fusion_fragments(summary: &TokenSeq, sources: &[TokenSeq], k_max: usize) -> Option<Vec<SourceSpan>> {
    let s = summary.as_slice();
    if s.is_empty() || sources.len() < 2 || k_max < 2 {
        return None;
    }

    // matches[pos] = (sentence, start, longest common extension)
    let matches: Vec<Vec<(usize, usize, usize)>> = (0..s.len())
        .map(|pos| {
            let mut out = Vec::new();
            for (si, src) in sources.iter().enumerate() {
                let src = src.as_slice();
                for start in 0..src.len() {
                    let ext = s[pos..]
                        .iter()
                        .zip(&src[start..])
                        .take_while(|(a, b)| a == b)
                        .count();
                    if ext > 0 {
                        out.push((si, start, ext));
                    }
                }
            }
            out
        })
        .collect();

    type Back = HashMap<FusionState, (Option<FusionState>, SourceSpan)>;
    let mut levels: Vec<Back> = Vec::new();
    let mut frontier: Vec<Option<FusionState>> = vec![None];

    for _level in 0..k_max {
        let mut next: Back = HashMap::new();
        let mut order: Vec<FusionState> = Vec::new();
        for prev in &frontier {
            let pos = prev.map_or(0, |p| p.pos);
            for &(si, start, ext) in &matches[pos] {
                if let Some(p) = prev {
                    if p.last_sentence == si && start < p.last_end {
                        continue;
                    }
                }
                for len in 1..=ext {
                    let state = FusionState {
                        pos: pos + len,
                        last_sentence: si,
                        last_end: start + len,
                        mixed: prev.is_some_and(|p| p.mixed || p.last_sentence != si),
                    };
                    if let std::collections::hash_map::Entry::Vacant(e) = next.entry(state) {
                        e.insert((
                            *prev,
                            SourceSpan {
                                sentence: si,
                                start,
                                end: start + len,
                            },
                        ));
                        order.push(state);
                    }
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        let done = order.iter().copied().find(|st| st.pos == s.len() && st.mixed);
        levels.push(next);
        if let Some(end) = done {
            return Some(reconstruct(&levels, end));
        }
        frontier = order.into_iter().filter(|st| st.pos < s.len()).map(Some).collect();
        if frontier.is_empty() {
            return None;
        }
    }
    None
}

fn reconstruct(
    levels: &[HashMap<FusionState, (Option<FusionState>, SourceSpan)>],
    end: FusionState,
) -> Vec<SourceSpan> {
    let mut out = Vec::with_capacity(levels.len());
    let mut cur = Some(end);
    for level in levels.iter().rev() {
        let state = cur.expect("back-pointer chain shorter than level count");
        let (prev, span) = level[&state];
        out.push(span);
        cur = prev;
    }
    out.reverse();
    out
}

/// Share of summary n-gram occurrences whose n-gram never occurs in the
/// document. `None` when the summary has fewer than `n` tokens.
pub fn novel_ngram_rate(summary: &TokenSeq, document: &TokenSeq, n: usize) -> Option<f64> {
    let (novel, total) = novel_ngram_counts(summary, document, n)?;
    Some(novel as f64 / total as f64)
}

fn novel_ngram_counts(summary: &TokenSeq, document: &TokenSeq, n: usize) -> Option<(usize, usize)> {
    if n == 0 || summary.len() < n {
        return None;
    }
    let doc = ngrams(document.as_slice(), n).ok()?;
    let total = summary.len() + 1 - n;
    let novel = summary.as_slice().windows(n).filter(|w| !doc.contains(w)).count();
    Some((novel, total))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionBreakdown {
    /// Fraction of sentences labeled perfect fusion with exactly two fragments.
    pub k2: f64,
    /// Fraction labeled perfect fusion with any k (includes `k2`).
    pub k_ge2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbstractivenessReport {
    pub label_fractions: BTreeMap<LabelKind, f64>,
    pub fusion: FusionBreakdown,
    /// Pooled over all summary n-gram occurrences of the corpus.
    pub novel_ngram_rate: BTreeMap<usize, f64>,
    pub sentence_count: usize,
}

/// Profiles every summary sentence of every record.
pub fn corpus_profile(
    records: &[Record],
    k_max: usize,
    ngram_orders: &[usize],
) -> Result<AbstractivenessReport, AbstractivenessError> {
    if records.is_empty() {
        return Err(AbstractivenessError::EmptyCorpus);
    }
    if k_max < 2 {
        return Err(AbstractivenessError::InvalidKMax(k_max));
    }

    let mut label_counts: BTreeMap<LabelKind, usize> = BTreeMap::new();
    let mut fusion_k2 = 0usize;
    let mut ngram_counts: BTreeMap<usize, (usize, usize)> =
        ngram_orders.iter().map(|&n| (n, (0, 0))).collect();
    let mut sentences = 0usize;

    for record in records {
        let wrap = |e: AbstractivenessError| AbstractivenessError::Record {
            record: record.id.clone(),
            source: Box::new(e),
        };
        let sources: Vec<TokenSeq> = split_sentences(&record.document)
            .iter()
            .map(|s| tokenize(&s.text))
            .collect();
        let document = tokenize(&record.document);
        for summary_text in &record.summary_sentences {
            let summary = tokenize(summary_text);
            let label = classify_sentence(&summary, &sources, k_max).map_err(wrap)?;
            *label_counts.entry(label.kind).or_insert(0) += 1;
            if label.k == Some(2) {
                fusion_k2 += 1;
            }
            for (&n, acc) in ngram_counts.iter_mut() {
                if let Some((novel, total)) = novel_ngram_counts(&summary, &document, n) {
                    acc.0 += novel;
                    acc.1 += total;
                }
            }
            sentences += 1;
        }
    }

    if sentences == 0 {
        return Err(AbstractivenessError::EmptyCorpus);
    }
    let frac = |c: usize| c as f64 / sentences as f64;
    let label_fractions = LabelKind::ALL
        .iter()
        .map(|&k| (k, frac(label_counts.get(&k).copied().unwrap_or(0))))
        .collect::<BTreeMap<_, _>>();
    let fusion = FusionBreakdown {
        k2: frac(fusion_k2),
        k_ge2: label_fractions[&LabelKind::PerfectFusion],
    };
    let novel_ngram_rate = ngram_counts
        .into_iter()
        .map(|(n, (novel, total))| (n, if total == 0 { 0.0 } else { novel as f64 / total as f64 }))
        .collect();

    Ok(AbstractivenessReport {
        label_fractions,
        fusion,
        novel_ngram_rate,
        sentence_count: sentences,
    })
}
