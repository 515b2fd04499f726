//! A one-response-fits-all HTTP server on localhost for client tests.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;

pub struct MockServer {
    pub base: String,
    pub requests: Arc<Mutex<Vec<String>>>,
}

/// Serves `status` with `body` to every request until the process exits.
pub fn serve(status: u16, body: &str) -> MockServer {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let requests = Arc::new(Mutex::new(Vec::new()));
    let seen = Arc::clone(&requests);
    let body = body.to_string();
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            if reader.read_line(&mut request_line).is_err() {
                continue;
            }
            loop {
                let mut line = String::new();
                match reader.read_line(&mut line) {
                    Ok(0) | Err(_) => break,
                    Ok(_) if line == "\r\n" || line == "\n" => break,
                    Ok(_) => {}
                }
            }
            seen.lock().unwrap().push(request_line.trim_end().to_string());
            let response = format!(
                "HTTP/1.1 {status} Mock\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            let _ = stream.write_all(response.as_bytes());
            let _ = stream.flush();
        }
    });
    MockServer { base, requests }
}

/// SGS-style payload for consecutive months starting at `year`-`month`.
pub fn sgs_payload(year: i32, month: u32, values: &[&str]) -> String {
    let items: Vec<String> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let ord = year * 12 + (month as i32 - 1) + i as i32;
            format!(
                r#"{{"data":"01/{:02}/{}","valor":"{v}"}}"#,
                ord % 12 + 1,
                ord / 12
            )
        })
        .collect();
    format!("[{}]", items.join(","))
}
