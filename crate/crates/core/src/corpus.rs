//! JSONL corpus ingestion and emission.
//!
//! One JSON object per line:
//!
//! ```text
//! {"id": "a", "document": "X. Y.", "summary_sentences": ["X."],
//!  "reference": "optional", "human_score": 0.5, "external_scores": {"bertscore": 0.9}}
//! ```
//!
//! Blank lines are skipped. All text is NFC-normalized on load.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::text::nfc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub document: String,
    pub summary_sentences: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external_scores: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: invalid JSON: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: field `{field}`: {message}")]
    Schema {
        line: usize,
        field: String,
        message: String,
    },
    #[error("line {line}: duplicate id `{id}` (first seen on line {first})")]
    DuplicateId { line: usize, id: String, first: usize },
}

impl CorpusError {
    fn schema(line: usize, field: &str, message: impl Into<String>) -> Self {
        CorpusError::Schema {
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

fn string_field(obj: &Map<String, Value>, line: usize, field: &str) -> Result<Option<String>, CorpusError> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(nfc(s))),
        Some(_) => Err(CorpusError::schema(line, field, "expected a string")),
    }
}

fn finite(v: &Value) -> Option<f64> {
    v.as_f64().filter(|x| x.is_finite())
}

/// Validates one parsed line.
pub fn record_from_value(value: Value, line: usize) -> Result<Record, CorpusError> {
    let Value::Object(obj) = value else {
        return Err(CorpusError::Parse {
            line,
            message: "expected a JSON object".into(),
        });
    };
    let missing = |field: &str| CorpusError::schema(line, field, "missing required field");

    let id = string_field(&obj, line, "id")?.ok_or_else(|| missing("id"))?;
    if id.is_empty() {
        return Err(CorpusError::schema(line, "id", "must not be empty"));
    }
    let document = string_field(&obj, line, "document")?.ok_or_else(|| missing("document"))?;
    if document.trim().is_empty() {
        return Err(CorpusError::schema(line, "document", "must not be empty"));
    }

    let summary_sentences = match obj.get("summary_sentences") {
        None | Some(Value::Null) => return Err(missing("summary_sentences")),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_str()
                    .map(nfc)
                    .ok_or_else(|| CorpusError::schema(line, "summary_sentences", "expected an array of strings"))
            })
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => {
            return Err(CorpusError::schema(line, "summary_sentences", "expected an array of strings"))
        }
    };
    if !summary_sentences.iter().any(|s| !s.trim().is_empty()) {
        return Err(CorpusError::schema(
            line,
            "summary_sentences",
            "needs at least one non-empty sentence",
        ));
    }

    let reference = string_field(&obj, line, "reference")?;
    let human_score = match obj.get("human_score") {
        None | Some(Value::Null) => None,
        Some(v) => Some(finite(v).ok_or_else(|| CorpusError::schema(line, "human_score", "expected a finite number"))?),
    };
    let external_scores = match obj.get("external_scores") {
        None | Some(Value::Null) => None,
        Some(Value::Object(map)) => Some(
            map.iter()
                .map(|(k, v)| {
                    finite(v).map(|x| (nfc(k), x)).ok_or_else(|| {
                        CorpusError::schema(line, "external_scores", format!("`{k}` is not a finite number"))
                    })
                })
                .collect::<Result<BTreeMap<_, _>, _>>()?,
        ),
        Some(_) => return Err(CorpusError::schema(line, "external_scores", "expected an object")),
    };

    Ok(Record {
        id,
        document,
        summary_sentences,
        reference,
        human_score,
        external_scores,
    })
}

/// Reads and validates a JSONL corpus, keeping file order.
pub fn read_corpus(reader: impl BufRead) -> Result<Vec<Record>, CorpusError> {
    let mut records = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let record = record_from_value(value, line_no)?;
        if let Some(&first) = seen.get(&record.id) {
            return Err(CorpusError::DuplicateId {
                line: line_no,
                id: record.id,
                first,
            });
        }
        seen.insert(record.id.clone(), line_no);
        records.push(record);
    }
    Ok(records)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Record>, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_corpus(BufReader::new(file))
}

/// Writes records as JSONL, one per line.
pub fn write_corpus(mut writer: impl Write, records: &[Record]) -> io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Names of every external score present anywhere in the corpus, sorted.
pub fn external_metric_names(records: &[Record]) -> Vec<String> {
    let names: HashSet<&String> = records
        .iter()
        .filter_map(|r| r.external_scores.as_ref())
        .flat_map(|m| m.keys())
        .collect();
    let mut names: Vec<String> = names.into_iter().cloned().collect();
    names.sort();
    names
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<Record>, CorpusError> {
        read_corpus(text.as_bytes())
    }

    #[test]
    fn minimal_line() {
        let records = parse(r#"{"id":"a","document":"X. Y.","summary_sentences":["X."]}"#).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].summary_sentences, vec!["X."]);
        assert_eq!(records[0].human_score, None);
    }

    #[test]
    fn missing_document_names_field_and_line() {
        let err = parse("\n{\"id\":\"a\",\"summary_sentences\":[\"X.\"]}").unwrap_err();
        match err {
            CorpusError::Schema { line, field, .. } => {
                assert_eq!(line, 2);
                assert_eq!(field, "document");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn duplicate_ids() {
        let text = "{\"id\":\"a\",\"document\":\"X.\",\"summary_sentences\":[\"X.\"]}\n\
                    {\"id\":\"a\",\"document\":\"Y.\",\"summary_sentences\":[\"Y.\"]}";
        assert!(matches!(parse(text), Err(CorpusError::DuplicateId { line: 2, first: 1, .. })));
    }

    #[test]
    fn bad_json_reports_line() {
        assert!(matches!(parse("{}\n{oops"), Err(CorpusError::Schema { line: 1, .. })));
        assert!(matches!(parse("{oops"), Err(CorpusError::Parse { line: 1, .. })));
    }

    #[test]
    fn type_errors() {
        for line in [
            r#"{"id":"a","document":"X.","summary_sentences":"X."}"#,
            r#"{"id":"a","document":"X.","summary_sentences":[]}"#,
            r#"{"id":"a","document":"  ","summary_sentences":["X."]}"#,
            r#"{"id":"a","document":"X.","summary_sentences":["X."],"human_score":"high"}"#,
            r#"{"id":"a","document":"X.","summary_sentences":["X."],"external_scores":{"m":"x"}}"#,
            r#"{"id":7,"document":"X.","summary_sentences":["X."]}"#,
        ] {
            assert!(matches!(parse(line), Err(CorpusError::Schema { .. })), "{line}");
        }
    }

    #[test]
    fn decomposed_text_is_composed() {
        let records = parse("{\"id\":\"a\",\"document\":\"Cafe\\u0301.\",\"summary_sentences\":[\"Cafe\\u0301.\"]}").unwrap();
        assert_eq!(records[0].document, "Caf\u{e9}.");
    }

    #[test]
    fn round_trip() {
        let text = concat!(
            r#"{"id":"b","document":"Ann ran. Bo sat.","summary_sentences":["Ann ran."],"reference":"Ann ran.","human_score":0.25,"external_scores":{"m1":0.5,"m2":-1.0}}"#,
            "\n",
            r#"{"id":"a","document":"X. Y.","summary_sentences":["X.","Y."]}"#,
            "\n"
        );
        let records = parse(text).unwrap();
        let mut out = Vec::new();
        write_corpus(&mut out, &records).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), text);
        assert_eq!(read_corpus(out.as_slice()).unwrap(), records);
        assert_eq!(external_metric_names(&records), vec!["m1", "m2"]);
    }
}
