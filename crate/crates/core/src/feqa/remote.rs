//! HTTP client for an external question-answering service.
//!
//! Protocol: `POST {endpoint}/answer` with body
//! `{"question": string, "context": string}`, answered by
//! `{"answer": string, "unanswerable": bool, "confidence": float}`.
//! JSON over HTTP/1.1, UTF-8. Requests are stateless, so transport failures
//! and 5xx responses are retried.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::backend::{BackendError, QaAnswer, QaBackend};

#[derive(Debug, Serialize)]
pub struct AnswerRequest<'a> {
    pub question: &'a str,
    pub context: &'a str,
}

#[derive(Debug, Deserialize)]
struct AnswerResponse {
    answer: String,
    unanswerable: bool,
    confidence: f64,
}

#[derive(Debug, Clone)]
pub struct RemoteBackend {
    endpoint: String,
    agent: ureq::Agent,
    attempts: usize,
    backoff: Duration,
}

impl RemoteBackend {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self::with_timeout(endpoint, Duration::from_secs(30))
    }

    pub fn with_timeout(endpoint: impl Into<String>, timeout: Duration) -> Self {
        let endpoint = endpoint.into().trim_end_matches('/').to_string();
        RemoteBackend {
            endpoint,
            agent: ureq::AgentBuilder::new()
                .timeout_connect(timeout)
                .timeout(timeout)
                .build(),
            attempts: 3,
            backoff: Duration::from_millis(100),
        }
    }

    /// Total attempts per request, including the first.
    pub fn attempts(mut self, attempts: usize) -> Self {
        self.attempts = attempts.max(1);
        self
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn post_once(&self, body: &str) -> Result<String, (BackendError, bool)> {
        let url = format!("{}/answer", self.endpoint);
        match self
            .agent
            .post(&url)
            .set("Content-Type", "application/json; charset=utf-8")
            .send_string(body)
        {
            Ok(resp) => resp
                .into_string()
                .map_err(|e| (BackendError::Unavailable(format!("reading response: {e}")), true)),
            Err(ureq::Error::Status(code, resp)) => {
                let detail = resp.into_string().unwrap_or_default();
                let retry = code >= 500;
                let err = if retry {
                    BackendError::Unavailable(format!("HTTP {code} from {url}: {detail}"))
                } else {
                    BackendError::MalformedResponse(format!("HTTP {code} from {url}: {detail}"))
                };
                Err((err, retry))
            }
            Err(ureq::Error::Transport(t)) => Err((BackendError::Unavailable(format!("{url}: {t}")), true)),
        }
    }
}

/// Parses and validates an `/answer` response body.
pub fn parse_answer(body: &str) -> Result<QaAnswer, BackendError> {
    let parsed: AnswerResponse =
        serde_json::from_str(body).map_err(|e| BackendError::MalformedResponse(e.to_string()))?;
    let answer = QaAnswer {
        answer: parsed.answer,
        unanswerable: parsed.unanswerable,
        confidence: parsed.confidence,
    };
    answer.validate()?;
    Ok(answer)
}

impl QaBackend for RemoteBackend {
    fn answer(&self, question: &str, context: &str) -> Result<QaAnswer, BackendError> {
        let body = serde_json::to_string(&AnswerRequest { question, context })
            .map_err(|e| BackendError::MalformedResponse(e.to_string()))?;
        let mut last = BackendError::Unavailable("no attempt made".into());
        for attempt in 0..self.attempts {
            if attempt > 0 {
                std::thread::sleep(self.backoff * attempt as u32);
            }
            match self.post_once(&body) {
                Ok(text) => return parse_answer(&text),
                Err((err, retry)) => {
                    log::warn!("QA request attempt {} failed: {err}", attempt + 1);
                    last = err;
                    if !retry {
                        break;
                    }
                }
            }
        }
        Err(last)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_valid_responses() {
        let a = parse_answer(r#"{"answer":"Ross Wallace","unanswerable":false,"confidence":0.9}"#).unwrap();
        assert_eq!(a.answer, "Ross Wallace");
        let a = parse_answer(r#"{"answer":"","unanswerable":true,"confidence":0.0}"#).unwrap();
        assert!(a.unanswerable);
    }

    #[test]
    fn rejects_protocol_violations() {
        for body in [
            "not json",
            r#"{"answer":"x","unanswerable":false}"#,
            r#"{"answer":"x","unanswerable":true,"confidence":0.2}"#,
            r#"{"answer":"x","unanswerable":false,"confidence":2.0}"#,
            r#"{"answer":1,"unanswerable":false,"confidence":0.2}"#,
        ] {
            assert!(matches!(parse_answer(body), Err(BackendError::MalformedResponse(_))), "{body}");
        }
    }

    #[test]
    fn unreachable_endpoint_is_unavailable() {
        // Port 9 on localhost is reserved (discard) and not listening here.
        let backend = RemoteBackend::with_timeout("http://127.0.0.1:9", Duration::from_millis(200)).attempts(1);
        assert!(matches!(backend.answer("q?", "c."), Err(BackendError::Unavailable(_))));
    }

    #[test]
    fn request_body_shape() {
        let body = serde_json::to_string(&AnswerRequest { question: "Who?", context: "Ann ran." }).unwrap();
        assert_eq!(body, r#"{"question":"Who?","context":"Ann ran."}"#);
    }
}
