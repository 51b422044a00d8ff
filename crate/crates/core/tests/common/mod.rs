//! Minimal HTTP/1.1 server speaking the `/answer` protocol, backed by a
//! closure. One request per connection.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

pub struct Reply {
    pub status: u16,
    pub body: String,
}

pub struct StubServer {
    pub url: String,
    pub requests: Arc<AtomicUsize>,
}

fn read_request(stream: &mut TcpStream) -> Option<(String, String)> {
    let mut reader = BufReader::new(stream);
    let mut request_line = String::new();
    reader.read_line(&mut request_line).ok()?;
    let mut length = 0usize;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line).ok()?;
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((name, value)) = line.split_once(':') {
            if name.eq_ignore_ascii_case("content-length") {
                length = value.trim().parse().ok()?;
            }
        }
    }
    let mut body = vec![0u8; length];
    reader.read_exact(&mut body).ok()?;
    let path = request_line.split_whitespace().nth(1)?.to_string();
    Some((path, String::from_utf8(body).ok()?))
}

impl StubServer {
    /// `handler(path, body, request_number)` produces the reply.
    pub fn start<F>(handler: F) -> StubServer
    where
        F: Fn(&str, &str, usize) -> Reply + Send + Sync + 'static,
    {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let requests = Arc::new(AtomicUsize::new(0));
        let counter = requests.clone();
        let handler = Arc::new(handler);
        thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(mut stream) = stream else { continue };
                let handler = handler.clone();
                let counter = counter.clone();
                thread::spawn(move || {
                    let Some((path, body)) = read_request(&mut stream) else { return };
                    let n = counter.fetch_add(1, Ordering::SeqCst);
                    let reply = handler(&path, &body, n);
                    let response = format!(
                        "HTTP/1.1 {} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                        reply.status,
                        reply.body.len(),
                        reply.body
                    );
                    let _ = stream.write_all(response.as_bytes());
                });
            }
        });
        StubServer { url, requests }
    }

    /// Answers with the lexical reader, as a protocol-conformant stand-in
    /// for a neural QA service.
    pub fn lexical() -> StubServer {
        use faithcheck::feqa::{LexicalBackend, QaBackend};
        StubServer::start(|path, body, _| {
            if path != "/answer" {
                return Reply { status: 404, body: String::new() };
            }
            let request: serde_json::Value = match serde_json::from_str(body) {
                Ok(v) => v,
                Err(_) => return Reply { status: 400, body: "{}".into() },
            };
            let (Some(q), Some(c)) = (request["question"].as_str(), request["context"].as_str()) else {
                return Reply { status: 422, body: "{}".into() };
            };
            let a = LexicalBackend::default().answer(q, c).unwrap();
            Reply {
                status: 200,
                body: serde_json::json!({
                    "answer": a.answer,
                    "unanswerable": a.unanswerable,
                    "confidence": a.confidence,
                })
                .to_string(),
            }
        })
    }
}
