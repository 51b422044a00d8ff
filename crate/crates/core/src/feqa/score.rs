//! Answer F1 and the per-sentence faithfulness score.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::backend::{BackendError, QaAnswer, QaBackend};
use super::question::{QaPair, QuestionGenerator, RuleBasedGenerator};
use super::spans::{HeuristicChunker, SpanExtractor, DEFAULT_MAX_SPANS};
use crate::overlap::harmonic_mean;
use crate::text::{normalize_answer, Sentence};

/// SQuAD token F1 between a gold answer and a prediction.
///
/// Both empty after normalization scores 1; exactly one empty scores 0.
///
/// ```
/// use faithcheck::feqa::token_f1;
///
/// assert_eq!(token_f1("six months", "six months"), 1.0);
/// assert_eq!(token_f1("Donald Trump", "the President of the United States Donald Trump"), 0.5);
/// ```
pub fn token_f1(gold: &str, predicted: &str) -> f64 {
    let gold = normalize_answer(gold);
    let pred = normalize_answer(predicted);
    match (gold.is_empty(), pred.is_empty()) {
        (true, true) => return 1.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in gold.iter() {
        *counts.entry(t).or_insert(0) += 1;
    }
    let mut common = 0usize;
    for t in pred.iter() {
        if let Some(c) = counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                common += 1;
            }
        }
    }
    if common == 0 {
        return 0.0;
    }
    harmonic_mean(common as f64 / pred.len() as f64, common as f64 / gold.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreStatus {
    Scored,
    /// No span produced a usable question; excluded from corpus means.
    NoQuestions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionOutcome {
    pub pair: QaPair,
    pub answer: QaAnswer,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaithfulnessScore {
    /// Mean F1 over `per_question`; 0 when `status` is `NoQuestions`.
    pub value: f64,
    pub per_question: Vec<QuestionOutcome>,
    pub status: ScoreStatus,
    /// Spans for which no question could be generated.
    pub skipped_spans: usize,
}

impl FaithfulnessScore {
    pub fn score(&self) -> Option<f64> {
        (self.status == ScoreStatus::Scored).then_some(self.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeqaConfig {
    pub max_spans: usize,
}

impl Default for FeqaConfig {
    fn default() -> Self {
        FeqaConfig {
            max_spans: DEFAULT_MAX_SPANS,
        }
    }
}

/// Span extractor, question generator and QA backend wired together.
pub struct Feqa<'a> {
    pub extractor: &'a dyn SpanExtractor,
    pub generator: &'a dyn QuestionGenerator,
    pub backend: &'a dyn QaBackend,
    pub config: FeqaConfig,
}

impl<'a> Feqa<'a> {
    pub fn new(backend: &'a dyn QaBackend, config: FeqaConfig) -> Self {
        Feqa {
            extractor: &HeuristicChunker,
            generator: &RuleBasedGenerator,
            backend,
            config,
        }
    }

    /// Questions generated for a summary sentence, deduplicated on
    /// (question, normalized gold answer). Also returns the number of spans
    /// that failed to generate.
    pub fn questions(&self, sentence: &Sentence) -> (Vec<QaPair>, usize) {
        let mut seen = HashSet::new();
        let mut pairs = Vec::new();
        let mut skipped = 0;
        for span in self.extractor.extract(sentence, self.config.max_spans) {
            match self.generator.generate(sentence, &span) {
                Ok(pair) => {
                    let key = (pair.question.clone(), normalize_answer(&pair.gold_answer.text));
                    if seen.insert(key) {
                        pairs.push(pair);
                    }
                }
                Err(e) => {
                    log::debug!("skipping span {:?} of {:?}: {e}", span.text, sentence.text);
                    skipped += 1;
                }
            }
        }
        (pairs, skipped)
    }

    pub fn score(&self, sentence: &Sentence, document: &str) -> Result<FaithfulnessScore, BackendError> {
        let (pairs, skipped_spans) = self.questions(sentence);
        if pairs.is_empty() {
            return Ok(FaithfulnessScore {
                value: 0.0,
                per_question: Vec::new(),
                status: ScoreStatus::NoQuestions,
                skipped_spans,
            });
        }
        let mut per_question = Vec::with_capacity(pairs.len());
        for pair in pairs {
            let answer = self.backend.answer(&pair.question, document)?;
            let f1 = if answer.unanswerable {
                0.0
            } else {
                token_f1(&pair.gold_answer.text, &answer.answer)
            };
            per_question.push(QuestionOutcome { pair, answer, f1 });
        }
        let value = per_question.iter().map(|q| q.f1).sum::<f64>() / per_question.len() as f64;
        Ok(FaithfulnessScore {
            value,
            per_question,
            status: ScoreStatus::Scored,
            skipped_spans,
        })
    }
}

/// Faithfulness of one summary sentence to its document, with the default
/// chunker and question generator.
pub fn feqa_score(
    sentence: &Sentence,
    document: &str,
    backend: &dyn QaBackend,
    config: FeqaConfig,
) -> Result<FaithfulnessScore, BackendError> {
    Feqa::new(backend, config).score(sentence, document)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feqa::backend::LexicalBackend;
    use proptest::prelude::*;

    #[test]
    fn f1_examples() {
        assert_eq!(token_f1("six months", "six months"), 1.0);
        assert_eq!(token_f1("Dean Marney", "Ross Wallace"), 0.0);
        assert!((token_f1("Donald Trump", "the President of the United States Donald Trump") - 0.5).abs() < 1e-12);
        assert_eq!(token_f1("", ""), 1.0);
        assert_eq!(token_f1("the", "a"), 1.0);
        assert_eq!(token_f1("x", ""), 0.0);
        assert_eq!(token_f1("", "x"), 0.0);
    }

    struct Scripted(Vec<QaAnswer>, std::sync::Mutex<usize>);

    impl QaBackend for Scripted {
        fn answer(&self, _q: &str, _c: &str) -> Result<QaAnswer, BackendError> {
            let mut i = self.1.lock().unwrap();
            let a = self.0[*i % self.0.len()].clone();
            *i += 1;
            Ok(a)
        }
    }

    struct Down;

    impl QaBackend for Down {
        fn answer(&self, _q: &str, _c: &str) -> Result<QaAnswer, BackendError> {
            Err(BackendError::Unavailable("down".into()))
        }
    }

    #[test]
    fn verbatim_copy_scores_one() {
        let doc = "The weather was mild. Sally was born in 1958 in a small town. She moved away.";
        let s = Sentence::new("Sally was born in 1958 in a small town.", 0);
        let score = feqa_score(&s, doc, &LexicalBackend::default(), FeqaConfig::default()).unwrap();
        assert_eq!(score.status, ScoreStatus::Scored);
        assert_eq!(score.value, 1.0, "{:#?}", score.per_question);
    }

    #[test]
    fn unanswerable_counts_as_wrong() {
        let s = Sentence::new("Sally was born in 1958", 0);
        let backend = Scripted(vec![QaAnswer::unanswerable()], Default::default());
        let score = feqa_score(&s, "Anything.", &backend, FeqaConfig::default()).unwrap();
        assert_eq!(score.value, 0.0);
        assert_eq!(score.per_question.len(), 2);
    }

    #[test]
    fn mean_of_question_scores() {
        let s = Sentence::new("Sally was born in 1958", 0);
        let backend = Scripted(
            vec![
                QaAnswer { answer: "Sally".into(), unanswerable: false, confidence: 1.0 },
                QaAnswer { answer: "1990".into(), unanswerable: false, confidence: 1.0 },
            ],
            Default::default(),
        );
        let score = feqa_score(&s, "Sally was born in 1990.", &backend, FeqaConfig::default()).unwrap();
        assert_eq!(score.value, 0.5);
        let recomputed = score.per_question.iter().map(|q| q.f1).sum::<f64>() / score.per_question.len() as f64;
        assert_eq!(recomputed, score.value);
    }

    #[test]
    fn no_questions_status() {
        let s = Sentence::new("it rained", 0);
        let score = feqa_score(&s, "It rained.", &LexicalBackend::default(), FeqaConfig::default()).unwrap();
        assert_eq!(score.status, ScoreStatus::NoQuestions);
        assert_eq!(score.score(), None);
        assert!(score.per_question.is_empty());
    }

    #[test]
    fn backend_errors_propagate() {
        let s = Sentence::new("Sally was born in 1958", 0);
        assert!(feqa_score(&s, "Sally.", &Down, FeqaConfig::default()).is_err());
    }

    #[test]
    fn duplicate_questions_are_merged() {
        let s = Sentence::new("The dog met the dog", 0);
        let backend = LexicalBackend::default();
        let feqa = Feqa::new(&backend, FeqaConfig::default());
        let (pairs, _) = feqa.questions(&s);
        let mut keys: Vec<_> = pairs.iter().map(|p| (p.question.clone(), p.gold_answer.text.to_lowercase())).collect();
        keys.dedup();
        assert_eq!(keys.len(), pairs.len());
    }

    proptest! {
        #[test]
        fn f1_symmetric_and_bounded(a in "[a-e ]{0,12}", b in "[a-e ]{0,12}") {
            let ab = token_f1(&a, &b);
            prop_assert!((ab - token_f1(&b, &a)).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab));
            if !normalize_answer(&a).is_empty() {
                prop_assert_eq!(token_f1(&a, &a), 1.0);
            }
        }
    }
}
