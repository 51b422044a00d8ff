//! Corpus-level commands behind the `faithcheck` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abstractiveness::{corpus_profile, AbstractivenessError, AbstractivenessReport, LabelKind};
use crate::corpus::{external_metric_names, CorpusError, Record};
use crate::feqa::{BackendError, Feqa, FeqaConfig, LexicalBackend, QaBackend, RemoteBackend, ScoreStatus};
use crate::overlap::{score_vs_source, Aggregation, MetricName, OverlapMetric};
use crate::stats::{correlate, significance_stars, CorrelationReport, StatsError};
use crate::text::{split_sentences, tokenize, Sentence, TokenSeq};

pub const DEFAULT_CONCURRENCY: usize = 8;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Profile(#[from] AbstractivenessError),
    #[error("record `{record}` has no reference summary, required by `{metric}`")]
    MissingReference { record: String, metric: MetricName },
    #[error("need human scores on at least 3 records, found {0}")]
    InsufficientData(usize),
    #[error("cannot parse report: {0}")]
    Report(String),
}

impl RunError {
    /// Process exit code: 1 for usage or configuration errors, 2 for data errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Tsv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(OutputFormat::Tsv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected tsv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum BackendChoice {
    #[default]
    Lexical,
    Remote {
        endpoint: String,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub metrics: Vec<MetricName>,
    pub aggregation: Aggregation,
    pub k_max: usize,
    pub ngram_orders: Vec<usize>,
    pub backend: BackendChoice,
    pub max_spans: usize,
    pub concurrency: usize,
    pub format: OutputFormat,
    /// Re-split each supplied summary entry into sentences.
    pub split_summary: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            metrics: default_metrics(),
            aggregation: Aggregation::Avg,
            k_max: crate::abstractiveness::DEFAULT_K_MAX,
            ngram_orders: vec![1, 2, 3],
            backend: BackendChoice::Lexical,
            max_spans: crate::feqa::DEFAULT_MAX_SPANS,
            concurrency: DEFAULT_CONCURRENCY,
            format: OutputFormat::Tsv,
            split_summary: false,
        }
    }
}

pub fn default_metrics() -> Vec<MetricName> {
    OverlapMetric::ALL.into_iter().map(MetricName::Overlap).collect()
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: &str| Err(RunError::Config(m.to_string()));
        if self.k_max < 2 {
            return bad("--k-max must be at least 2");
        }
        if self.max_spans == 0 {
            return bad("--max-spans must be positive");
        }
        if self.concurrency == 0 {
            return bad("--concurrency must be positive");
        }
        if self.ngram_orders.is_empty() || self.ngram_orders.contains(&0) {
            return bad("n-gram orders must be positive");
        }
        if self.metrics.is_empty() {
            return bad("no metric selected");
        }
        if self.aggregation == Aggregation::None {
            return bad("--agg must be avg or max");
        }
        if let BackendChoice::Remote { endpoint } = &self.backend {
            if endpoint.trim().is_empty() {
                return bad("remote backend needs an endpoint");
            }
        }
        Ok(())
    }

    fn qa_backend(&self) -> Box<dyn QaBackend> {
        match &self.backend {
            BackendChoice::Lexical => Box::new(LexicalBackend::default()),
            BackendChoice::Remote { endpoint } => Box::new(RemoteBackend::new(endpoint.clone())),
        }
    }
}

/// Summary sentences of a record, optionally re-split.
pub fn summary_sentences(record: &Record, split: bool) -> Vec<String> {
    let entries = record.summary_sentences.iter().filter(|s| !s.trim().is_empty());
    if split {
        entries
            .flat_map(|s| split_sentences(s).into_iter().map(|s| s.text))
            .collect()
    } else {
        entries.cloned().collect()
    }
}

fn pct(x: f64) -> String {
    format!("{:.2}", x * 100.0)
}

pub fn run_profile(corpus: &[Record], config: &RunConfig) -> Result<AbstractivenessReport, RunError> {
    config.validate()?;
    let prepared: Vec<Record> = corpus
        .iter()
        .map(|r| Record {
            summary_sentences: summary_sentences(r, config.split_summary),
            ..r.clone()
        })
        .collect();
    Ok(corpus_profile(&prepared, config.k_max, &config.ngram_orders)?)
}

/// Header and one row: extraction types, fusion breakdown and novel n-gram
/// rates, as percentages.
pub fn profile_tsv(report: &AbstractivenessReport) -> String {
    let mut header = vec![
        "sentences".to_string(),
        "sentence_extraction".into(),
        "span_extraction".into(),
        "word_extraction".into(),
        "fusion_k2".into(),
        "fusion_k_ge2".into(),
    ];
    let mut row = vec![
        report.sentence_count.to_string(),
        pct(report.label_fractions[&LabelKind::SentenceExtraction]),
        pct(report.label_fractions[&LabelKind::SpanExtraction]),
        pct(report.label_fractions[&LabelKind::WordExtraction]),
        pct(report.fusion.k2),
        pct(report.fusion.k_ge2),
    ];
    for (n, rate) in &report.novel_ngram_rate {
        header.push(format!("novel_{n}gram"));
        row.push(pct(*rate));
    }
    header.push("other".into());
    row.push(pct(report.label_fractions[&LabelKind::Other]));
    format!("{}\n{}\n", header.join("\t"), row.join("\t"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Ok,
    NoQuestions,
    BackendUnavailable,
    MalformedResponse,
    /// External score absent from the record.
    Missing,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::NoQuestions => "no-questions",
            RowStatus::BackendUnavailable => "backend-unavailable",
            RowStatus::MalformedResponse => "malformed-response",
            RowStatus::Missing => "missing",
        }
    }

    fn from_backend(e: &BackendError) -> Self {
        match e {
            BackendError::Unavailable(_) => RowStatus::BackendUnavailable,
            BackendError::MalformedResponse(_) => RowStatus::MalformedResponse,
        }
    }

    pub fn is_backend_failure(self) -> bool {
        matches!(self, RowStatus::BackendUnavailable | RowStatus::MalformedResponse)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub record_id: String,
    /// Summary sentence index; `None` for record-level external scores.
    pub sentence: Option<usize>,
    pub metric: MetricName,
    pub aggregation: Aggregation,
    pub value: Option<f64>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub rows: Vec<ScoreRow>,
}

impl ScoreTable {
    pub fn backend_failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status.is_backend_failure()).count()
    }

    /// Per-record value of a metric: mean over scored sentences.
    pub fn record_values(&self, metric: &MetricName) -> BTreeMap<String, f64> {
        let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        for row in self.rows.iter().filter(|r| &r.metric == metric) {
            if let Some(v) = row.value {
                let e = acc.entry(row.record_id.clone()).or_insert((0.0, 0));
                e.0 += v;
                e.1 += 1;
            }
        }
        acc.into_iter().map(|(id, (sum, n))| (id, sum / n as f64)).collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("record_id\tsentence\tmetric\taggregation\tvalue\tstatus\n");
        for row in &self.rows {
            let sentence = row.sentence.map_or("-".to_string(), |i| i.to_string());
            let value = row.value.map_or(String::new(), |v| format!("{v:.6}"));
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                row.record_id,
                sentence,
                row.metric,
                row.aggregation,
                value,
                row.status.as_str()
            );
        }
        out
    }
}

fn sort_key(row: &ScoreRow) -> (String, Option<usize>, String) {
    (row.record_id.clone(), row.sentence, row.metric.to_string())
}

fn score_record(
    record: &Record,
    config: &RunConfig,
    feqa: &Feqa<'_>,
) -> Result<Vec<ScoreRow>, RunError> {
    let sentences = summary_sentences(record, config.split_summary);
    let sources: Vec<TokenSeq> = split_sentences(&record.document)
        .iter()
        .map(|s| tokenize(&s.text))
        .collect();
    let reference = record.reference.as_deref().map(tokenize);
    let mut rows = Vec::new();
    let row = |sentence, metric: &MetricName, aggregation, value, status| ScoreRow {
        record_id: record.id.clone(),
        sentence,
        metric: metric.clone(),
        aggregation,
        value,
        status,
    };

    for metric in &config.metrics {
        match metric {
            MetricName::External(name) => {
                let value = record.external_scores.as_ref().and_then(|m| m.get(name)).copied();
                let status = if value.is_some() { RowStatus::Ok } else { RowStatus::Missing };
                rows.push(row(None, metric, Aggregation::None, value, status));
            }
            MetricName::Reference(m) => {
                let Some(reference) = &reference else {
                    return Err(RunError::MissingReference {
                        record: record.id.clone(),
                        metric: metric.clone(),
                    });
                };
                for (i, s) in sentences.iter().enumerate() {
                    let value = m.score(&tokenize(s), reference);
                    rows.push(row(Some(i), metric, Aggregation::None, Some(value), RowStatus::Ok));
                }
            }
            MetricName::Overlap(m) => {
                for (i, s) in sentences.iter().enumerate() {
                    let score = score_vs_source(&tokenize(s), &sources, *m, config.aggregation)
                        .expect("validated record has a non-empty document");
                    rows.push(row(Some(i), metric, score.aggregation, Some(score.value), RowStatus::Ok));
                }
            }
            MetricName::Feqa => {
                for (i, s) in sentences.iter().enumerate() {
                    let sentence = Sentence::new(s.clone(), i);
                    let (value, status) = match feqa.score(&sentence, &record.document) {
                        Ok(score) if score.status == ScoreStatus::NoQuestions => (None, RowStatus::NoQuestions),
                        Ok(score) => (Some(score.value), RowStatus::Ok),
                        Err(e) => {
                            log::warn!("record {} sentence {i}: {e}", record.id);
                            (None, RowStatus::from_backend(&e))
                        }
                    };
                    rows.push(row(Some(i), metric, Aggregation::None, value, status));
                }
            }
        }
    }
    Ok(rows)
}

/// Scores every (record, sentence, metric) triple. Records are processed by
/// at most `config.concurrency` threads; rows come back sorted by record id,
/// sentence index and metric name.
pub fn run_score(corpus: &[Record], config: &RunConfig) -> Result<ScoreTable, RunError> {
    config.validate()?;
    let backend = config.qa_backend();
    let feqa = Feqa::new(
        backend.as_ref(),
        FeqaConfig {
            max_spans: config.max_spans,
        },
    );

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Result<Vec<ScoreRow>, RunError>>> = Mutex::new(Vec::new());
    let workers = config.concurrency.min(corpus.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(record) = corpus.get(i) else { break };
                let result = score_record(record, config, &feqa);
                results.lock().expect("worker panicked").push(result);
            });
        }
    });

    let mut rows = Vec::new();
    let mut first_error: Option<(String, RunError)> = None;
    for result in results.into_inner().expect("worker panicked") {
        match result {
            Ok(r) => rows.extend(r),
            Err(e) => {
                let key = match &e {
                    RunError::MissingReference { record, .. } => record.clone(),
                    _ => String::new(),
                };
                if first_error.as_ref().map_or(true, |(k, _)| key < *k) {
                    first_error = Some((key, e));
                }
            }
        }
    }
    if let Some((_, e)) = first_error {
        return Err(e);
    }
    rows.sort_by_key(sort_key);
    Ok(ScoreTable { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub metric: MetricName,
    /// Records with both a human score and a metric value.
    pub n: usize,
    /// Human-scored records lacking the metric.
    pub dropped: usize,
    /// `None` when the correlation is undefined.
    pub report: Option<CorrelationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub rows: Vec<CorrelationRow>,
}

/// Coefficient ×100 with two decimals and significance stars.
pub fn format_coefficient(coefficient: f64, p_value: f64) -> String {
    format!("{:.2}{}", coefficient * 100.0, significance_stars(p_value))
}

impl CorrelationTable {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("metric\tn\tdropped\tpearson\tp_pearson\tspearman\tp_spearman\n");
        for row in &self.rows {
            let cells = match &row.report {
                Some(r) => [
                    format_coefficient(r.pearson.coefficient, r.pearson.p_value),
                    format!("{:.3e}", r.pearson.p_value),
                    format_coefficient(r.spearman.coefficient, r.spearman.p_value),
                    format!("{:.3e}", r.spearman.p_value),
                ],
                None => std::array::from_fn(|_| "undefined".to_string()),
            };
            let _ = writeln!(out, "{}\t{}\t{}\t{}", row.metric, row.n, row.dropped, cells.join("\t"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("correlation table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Report(e.to_string()))
    }
}

/// Correlates each selected metric (plus every external score found in the
/// corpus) with the human scores, record by record.
pub fn run_correlate(corpus: &[Record], config: &RunConfig) -> Result<(CorrelationTable, ScoreTable), RunError> {
    config.validate()?;
    let human: BTreeMap<&str, f64> = corpus
        .iter()
        .filter_map(|r| r.human_score.map(|h| (r.id.as_str(), h)))
        .collect();
    if human.len() < 3 {
        return Err(RunError::InsufficientData(human.len()));
    }

    let mut config = config.clone();
    for name in external_metric_names(corpus) {
        let metric = MetricName::External(name);
        if !config.metrics.contains(&metric) {
            config.metrics.push(metric);
        }
    }
    let scores = run_score(corpus, &config)?;

    let mut rows = Vec::new();
    let mut metrics = config.metrics.clone();
    metrics.sort_by_key(|m| m.to_string());
    metrics.dedup();
    for metric in metrics {
        let values = scores.record_values(&metric);
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for (id, h) in &human {
            if let Some(v) = values.get(*id) {
                x.push(*v);
                y.push(*h);
            }
        }
        let dropped = human.len() - x.len();
        if dropped > 0 {
            log::warn!("{metric}: dropped {dropped} human-scored records without a value");
        }
        let (report, note) = match correlate(&x, &y) {
            Ok(r) => (Some(r), None),
            Err(e @ (StatsError::ConstantVector | StatsError::TooFewSamples(_))) => (None, Some(e.to_string())),
            Err(e) => return Err(RunError::Report(e.to_string())),
        };
        rows.push(CorrelationRow {
            metric,
            n: x.len(),
            dropped,
            report,
            note,
        });
    }
    Ok((CorrelationTable { rows }, scores))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, doc: &str, summary: &[&str], human: Option<f64>) -> Record {
        Record {
            id: id.into(),
            document: doc.into(),
            summary_sentences: summary.iter().map(|s| s.to_string()).collect(),
            reference: None,
            human_score: human,
            external_scores: None,
        }
    }

    #[test]
    fn rows_are_sorted_and_match_direct_scores() {
        let corpus = vec![
            record("b", "Ann ran home. Bo sat down.", &["Ann sat."], None),
            record("a", "The cat sat on the mat.", &["The cat lay on the mat."], None),
        ];
        let config = RunConfig {
            metrics: vec!["rouge1".parse().unwrap()],
            ..RunConfig::default()
        };
        let table = run_score(&corpus, &config).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.rows[0].record_id, "a");
        let direct = score_vs_source(
            &tokenize("The cat lay on the mat."),
            &[tokenize("The cat sat on the mat.")],
            OverlapMetric::Rouge1,
            Aggregation::Avg,
        )
        .unwrap();
        assert_eq!(table.rows[0].value, Some(direct.value));
    }

    #[test]
    fn reference_metric_requires_reference() {
        let corpus = vec![record("a", "X y z.", &["X y."], None)];
        let config = RunConfig {
            metrics: vec!["ref-rouge1".parse().unwrap()],
            ..RunConfig::default()
        };
        let err = run_score(&corpus, &config).unwrap_err();
        assert!(matches!(err, RunError::MissingReference { .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn feqa_on_faithful_copies() {
        let corpus = vec![record(
            "a",
            "The weather was mild. Sally was born in 1958 in a small town.",
            &["Sally was born in 1958 in a small town."],
            None,
        )];
        let config = RunConfig {
            metrics: vec![MetricName::Feqa],
            ..RunConfig::default()
        };
        let table = run_score(&corpus, &config).unwrap();
        assert_eq!(table.rows[0].value, Some(1.0));
        assert_eq!(table.backend_failures(), 0);
    }

    #[test]
    fn unreachable_backend_marks_rows() {
        let corpus = vec![record("a", "Sally was born in 1958.", &["Sally was born in 1958."], None)];
        let config = RunConfig {
            metrics: vec![MetricName::Feqa],
            backend: BackendChoice::Remote {
                endpoint: "http://127.0.0.1:9".into(),
            },
            ..RunConfig::default()
        };
        let table = run_score(&corpus, &config).unwrap();
        assert_eq!(table.rows[0].status, RowStatus::BackendUnavailable);
        assert_eq!(table.backend_failures(), 1);
    }

    #[test]
    fn correlation_of_identical_scores() {
        let mut corpus: Vec<Record> = (0..6)
            .map(|i| record(&format!("r{i}"), "A b c.", &["A b."], Some(i as f64 * 0.1)))
            .collect();
        for (i, r) in corpus.iter_mut().enumerate() {
            r.external_scores = Some(
                [("same".to_string(), i as f64 * 0.1), ("affine".to_string(), 2.0 * i as f64 * 0.1 + 3.0)]
                    .into_iter()
                    .collect(),
            );
        }
        corpus[5].external_scores = None;
        let config = RunConfig {
            metrics: vec!["rouge1".parse().unwrap()],
            ..RunConfig::default()
        };
        let (table, _) = run_correlate(&corpus, &config).unwrap();
        let same = table.rows.iter().find(|r| r.metric.to_string() == "external:same").unwrap();
        assert_eq!(same.n, 5);
        assert_eq!(same.dropped, 1);
        let report = same.report.unwrap();
        assert_eq!(format_coefficient(report.pearson.coefficient, report.pearson.p_value), "100.00**");
        let rouge = table.rows.iter().find(|r| r.metric.to_string() == "rouge1").unwrap();
        assert!(rouge.report.is_none(), "constant metric is undefined");
        assert!(table.to_tsv().contains("undefined"));
        assert_eq!(CorrelationTable::from_json(&table.to_json()).unwrap(), table);
    }

    #[test]
    fn too_few_human_scores() {
        let corpus = vec![record("a", "A.", &["A."], Some(1.0))];
        assert!(matches!(
            run_correlate(&corpus, &RunConfig::default()),
            Err(RunError::InsufficientData(1))
        ));
    }

    #[test]
    fn config_validation() {
        let mut config = RunConfig::default();
        config.k_max = 1;
        assert_eq!(config.validate().unwrap_err().exit_code(), 1);
        let config = RunConfig {
            backend: BackendChoice::Remote { endpoint: " ".into() },
            ..RunConfig::default()
        };
        assert!(config.validate().is_err());
    }

    #[test]
    fn profile_columns() {
        let corpus = vec![record("a", "Alpha beta gamma. Delta epsilon zeta.", &["Alpha beta gamma."], None)];
        let report = run_profile(&corpus, &RunConfig::default()).unwrap();
        let tsv = profile_tsv(&report);
        let mut lines = tsv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "sentences\tsentence_extraction\tspan_extraction\tword_extraction\tfusion_k2\tfusion_k_ge2\tnovel_1gram\tnovel_2gram\tnovel_3gram\tother"
        );
        assert_eq!(lines.next().unwrap(), "1\t100.00\t0.00\t0.00\t0.00\t0.00\t0.00\t0.00\t0.00\t0.00");
    }
}
