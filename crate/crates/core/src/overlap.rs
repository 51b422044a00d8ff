//! Word-overlap metrics: ROUGE-N, ROUGE-L (LCS) and sentence-level BLEU.
//!
//! No stemming and no stopword removal. ROUGE is reported as its F-measure
//! wherever a single scalar is needed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{ngrams, TokenSeq};

/// Replaces a zero clipped count in BLEU's modified precision.
pub const BLEU_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OverlapError {
    #[error("invalid n-gram order {0}: must be at least 1")]
    InvalidN(usize),
    #[error("no source sentences to score against")]
    EmptySources,
    #[error("reference summary is missing")]
    MissingReference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn from_counts(overlap: usize, candidate_total: usize, reference_total: usize) -> Prf {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(overlap, candidate_total);
        let recall = ratio(overlap, reference_total);
        Prf {
            precision,
            recall,
            f1: harmonic_mean(precision, recall),
        }
    }
}

pub fn harmonic_mean(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn rouge_n(candidate: &TokenSeq, reference: &TokenSeq, n: usize) -> Result<Prf, OverlapError> {
    let cand = ngrams(candidate.as_slice(), n).map_err(|_| OverlapError::InvalidN(n))?;
    let refr = ngrams(reference.as_slice(), n).map_err(|_| OverlapError::InvalidN(n))?;
    Ok(Prf::from_counts(cand.overlap(&refr), cand.total(), refr.total()))
}

/// Length of the longest common subsequence, in O(|a|·|b|) time and
/// O(min(|a|,|b|)) memory.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut row = vec![0usize; short.len() + 1];
    for x in long {
        let mut diag = 0;
        for (j, y) in short.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[short.len()]
}

pub fn rouge_l(candidate: &TokenSeq, reference: &TokenSeq) -> Prf {
    let lcs = lcs_len(candidate.as_slice(), reference.as_slice());
    Prf::from_counts(lcs, candidate.len(), reference.len())
}

/// Sentence-level BLEU with uniform weights over orders `1..=max_order`.
///
/// A modified precision with no clipped matches counts as
/// [`BLEU_EPSILON`]; an order longer than the candidate has precision
/// `BLEU_EPSILON` as well. The brevity penalty is `exp(1 - |ref|/|cand|)`
/// for candidates shorter than the reference.
pub fn bleu(candidate: &TokenSeq, reference: &TokenSeq, max_order: usize) -> Result<f64, OverlapError> {
    if max_order == 0 {
        return Err(OverlapError::InvalidN(0));
    }
    if candidate.is_empty() {
        return Ok(0.0);
    }
    let mut log_sum = 0.0;
    for n in 1..=max_order {
        let cand = ngrams(candidate.as_slice(), n).map_err(|_| OverlapError::InvalidN(n))?;
        let refr = ngrams(reference.as_slice(), n).map_err(|_| OverlapError::InvalidN(n))?;
        let clipped = cand.overlap(&refr);
        let numerator = if clipped == 0 { BLEU_EPSILON } else { clipped as f64 };
        let denominator = cand.total().max(1) as f64;
        log_sum += (numerator / denominator).ln();
    }
    let geo_mean = (log_sum / max_order as f64).exp();
    let (c, r) = (candidate.len() as f64, reference.len() as f64);
    let brevity = if c < r { (1.0 - r / c).exp() } else { 1.0 };
    Ok((geo_mean * brevity).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OverlapMetric {
    #[serde(rename = "rouge1")]
    Rouge1,
    #[serde(rename = "rouge2")]
    Rouge2,
    #[serde(rename = "rougeL")]
    RougeL,
    #[serde(rename = "bleu4")]
    Bleu4,
}

impl OverlapMetric {
    pub const ALL: [OverlapMetric; 4] = [
        OverlapMetric::Rouge1,
        OverlapMetric::Rouge2,
        OverlapMetric::RougeL,
        OverlapMetric::Bleu4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OverlapMetric::Rouge1 => "rouge1",
            OverlapMetric::Rouge2 => "rouge2",
            OverlapMetric::RougeL => "rougeL",
            OverlapMetric::Bleu4 => "bleu4",
        }
    }

    /// Scalar score of one candidate/reference pair.
    pub fn score(self, candidate: &TokenSeq, reference: &TokenSeq) -> f64 {
        match self {
            OverlapMetric::Rouge1 => rouge_n(candidate, reference, 1).expect("n >= 1").f1,
            OverlapMetric::Rouge2 => rouge_n(candidate, reference, 2).expect("n >= 1").f1,
            OverlapMetric::RougeL => rouge_l(candidate, reference).f1,
            OverlapMetric::Bleu4 => bleu(candidate, reference, 4).expect("order >= 1"),
        }
    }
}

impl fmt::Display for OverlapMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Avg,
    Max,
    None,
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::Avg => "avg",
            Aggregation::Max => "max",
            Aggregation::None => "none",
        })
    }
}

impl FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "avg" => Ok(Aggregation::Avg),
            "max" => Ok(Aggregation::Max),
            "none" => Ok(Aggregation::None),
            other => Err(format!("unknown aggregation `{other}` (expected avg or max)")),
        }
    }
}

/// Name of a scored quantity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricName {
    /// Output sentence vs. source sentences.
    Overlap(OverlapMetric),
    /// Output sentence vs. the reference summary (content selection).
    Reference(OverlapMetric),
    Feqa,
    External(String),
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricName::Overlap(m) => write!(f, "{m}"),
            MetricName::Reference(m) => write!(f, "ref-{m}"),
            MetricName::Feqa => f.write_str("feqa"),
            MetricName::External(name) => write!(f, "external:{name}"),
        }
    }
}

impl FromStr for MetricName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let overlap = |name: &str| OverlapMetric::ALL.into_iter().find(|m| m.name() == name);
        if s == "feqa" {
            return Ok(MetricName::Feqa);
        }
        if let Some(name) = s.strip_prefix("external:") {
            if name.is_empty() {
                return Err("external metric needs a name".into());
            }
            return Ok(MetricName::External(name.to_string()));
        }
        if let Some(name) = s.strip_prefix("ref-") {
            return overlap(name)
                .map(MetricName::Reference)
                .ok_or_else(|| format!("unknown reference metric `{s}`"));
        }
        overlap(s)
            .map(MetricName::Overlap)
            .ok_or_else(|| format!("unknown metric `{s}`"))
    }
}

impl Serialize for MetricName {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MetricName {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub metric: MetricName,
    pub value: f64,
    pub aggregation: Aggregation,
}

/// Scores a summary sentence against each source sentence (the source acting
/// as reference) and combines the per-sentence values.
pub fn score_vs_source(
    summary: &TokenSeq,
    sources: &[TokenSeq],
    metric: OverlapMetric,
    aggregation: Aggregation,
) -> Result<MetricScore, OverlapError> {
    if sources.is_empty() {
        return Err(OverlapError::EmptySources);
    }
    let values = sources.iter().map(|src| metric.score(summary, src));
    let value = match aggregation {
        Aggregation::Max => values.fold(f64::NEG_INFINITY, f64::max),
        Aggregation::Avg | Aggregation::None => values.sum::<f64>() / sources.len() as f64,
    };
    Ok(MetricScore {
        metric: MetricName::Overlap(metric),
        value,
        aggregation: if aggregation == Aggregation::Max { Aggregation::Max } else { Aggregation::Avg },
    })
}

/// ROUGE-1/2/L F-scores of an output sentence against the reference summary.
pub fn score_vs_reference(
    output: &TokenSeq,
    reference: Option<&TokenSeq>,
) -> Result<Vec<MetricScore>, OverlapError> {
    let reference = reference.ok_or(OverlapError::MissingReference)?;
    Ok([OverlapMetric::Rouge1, OverlapMetric::Rouge2, OverlapMetric::RougeL]
        .into_iter()
        .map(|m| MetricScore {
            metric: MetricName::Reference(m),
            value: m.score(output, reference),
            aggregation: Aggregation::None,
        })
        .collect())
}
