mod common;

use std::sync::atomic::Ordering;
use std::time::Duration;

use common::{Reply, StubServer};
use faithcheck::feqa::{feqa_score, BackendError, FeqaConfig, LexicalBackend, QaBackend, RemoteBackend};
use faithcheck::text::Sentence;

fn ok(answer: &str) -> Reply {
    Reply {
        status: 200,
        body: format!(r#"{{"answer":"{answer}","unanswerable":false,"confidence":0.8}}"#),
    }
}

#[test]
fn remote_matches_local_reader() {
    let server = StubServer::lexical();
    let remote = RemoteBackend::new(&server.url);
    let document = "Burnley face Spurs on Sunday. However, Winger Ross Wallace (knee) and right-back Steven Reid (calf) could return for the Barclays premier league contest.";
    let sentence = Sentence::new("Dean Marney and Steven Reid could return for the Barclays Premier League match.", 0);
    let over_http = feqa_score(&sentence, document, &remote, FeqaConfig::default()).unwrap();
    let local = feqa_score(&sentence, document, &LexicalBackend::default(), FeqaConfig::default()).unwrap();
    assert_eq!(over_http, local);
    assert!(server.requests.load(Ordering::SeqCst) > 0);
}

#[test]
fn request_carries_question_and_context() {
    let server = StubServer::start(|path, body, _| {
        assert_eq!(path, "/answer");
        let v: serde_json::Value = serde_json::from_str(body).unwrap();
        assert_eq!(v["question"], "Who ran?");
        assert_eq!(v["context"], "Ann ran.");
        ok("Ann")
    });
    let a = RemoteBackend::new(format!("{}/", server.url)).answer("Who ran?", "Ann ran.").unwrap();
    assert_eq!(a.answer, "Ann");
}

#[test]
fn server_errors_are_retried() {
    let server = StubServer::start(|_, _, n| {
        if n < 2 {
            Reply { status: 503, body: "busy".into() }
        } else {
            ok("Ann")
        }
    });
    let a = RemoteBackend::new(&server.url).answer("Who ran?", "Ann ran.").unwrap();
    assert_eq!(a.answer, "Ann");
    assert_eq!(server.requests.load(Ordering::SeqCst), 3);
}

#[test]
fn retries_are_bounded() {
    let server = StubServer::start(|_, _, _| Reply { status: 500, body: String::new() });
    let err = RemoteBackend::new(&server.url).attempts(2).answer("Who ran?", "Ann ran.").unwrap_err();
    assert!(matches!(err, BackendError::Unavailable(_)));
    assert_eq!(server.requests.load(Ordering::SeqCst), 2);
}

#[test]
fn client_errors_are_not_retried() {
    let server = StubServer::start(|_, _, _| Reply { status: 422, body: "{}".into() });
    let err = RemoteBackend::new(&server.url).answer("Who ran?", "Ann ran.").unwrap_err();
    assert!(matches!(err, BackendError::MalformedResponse(_)));
    assert_eq!(server.requests.load(Ordering::SeqCst), 1);
}

#[test]
fn invalid_bodies_are_malformed() {
    for body in [
        r#"{"answer":"","unanswerable":false,"confidence":0.5}"#,
        r#"{"answer":"x","unanswerable":false,"confidence":-0.1}"#,
        r#"["x"]"#,
    ] {
        let body = body.to_string();
        let server = StubServer::start(move |_, _, _| Reply { status: 200, body: body.clone() });
        let err = RemoteBackend::with_timeout(&server.url, Duration::from_secs(5))
            .answer("Who ran?", "Ann ran.")
            .unwrap_err();
        assert_eq!(err.tag(), "malformed-response");
    }
}

#[test]
fn empty_context_round_trips_as_unanswerable() {
    let server = StubServer::lexical();
    let a = RemoteBackend::new(&server.url).answer("When was Sally born?", "").unwrap();
    assert!(a.unanswerable);
    assert_eq!(a.answer, "");
}
