//! A scripted scorer for tests and protocol checks. It replays fixture
//! log2 probabilities instead of running a model.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use serde::Deserialize;

use super::{Endpoint, ErrorReply, InfoReply, Request, ScoreReply, TokenizeReply};

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct MockScorer {
    pub name: String,
    pub vocab_size: usize,
    /// Window `w` scores `log2p[w.target % log2p.len()]`; empty means
    /// uniform.
    pub log2p: Vec<f64>,
    /// Answer every batch with one value too few.
    #[serde(default)]
    pub misalign: bool,
}

impl MockScorer {
    pub fn new(name: &str, vocab_size: usize, log2p: Vec<f64>) -> Self {
        Self {
            name: name.to_string(),
            vocab_size,
            log2p,
            misalign: false,
        }
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    pub fn score(&self, target: u32) -> f64 {
        if self.log2p.is_empty() {
            -(self.vocab_size as f64).log2()
        } else {
            self.log2p[target as usize % self.log2p.len()]
        }
    }

    /// Answers one request line.
    pub fn handle(&self, line: &str) -> String {
        let reply = match serde_json::from_str::<Request>(line) {
            Err(e) => serde_json::to_string(&ErrorReply {
                error: format!("bad request: {e}"),
            }),
            Ok(Request::Info { .. }) => serde_json::to_string(&InfoReply {
                vocab_size: self.vocab_size,
                name: self.name.clone(),
            }),
            Ok(Request::Tokenize { text, .. }) => serde_json::to_string(&TokenizeReply {
                ids: text
                    .bytes()
                    .map(|b| (usize::from(b) % self.vocab_size) as u32)
                    .collect(),
            }),
            Ok(Request::ScoreBatch { id, windows }) => {
                let mut log2p: Vec<f64> = windows.iter().map(|w| self.score(w.target)).collect();
                if self.misalign {
                    log2p.pop();
                }
                serde_json::to_string(&ScoreReply { id, log2p })
            }
        };
        reply.expect("replies serialize")
    }

    /// Serves newline-delimited requests until the reader is exhausted.
    pub fn serve_lines<R: BufRead, W: Write>(&self, reader: R, mut writer: W) -> io::Result<()> {
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            writer.write_all(format!("{}\n", self.handle(&line)).as_bytes())?;
            writer.flush()?;
        }
        Ok(())
    }

    fn serve_connection(&self, stream: TcpStream) -> io::Result<()> {
        stream.set_nodelay(true)?;
        let mut reader = BufReader::new(stream.try_clone()?);
        let mut writer = stream;
        let mut first = String::new();
        if reader.read_line(&mut first)? == 0 {
            return Ok(());
        }
        if first.starts_with("POST ") {
            return self.serve_http(reader, writer);
        }
        if !first.trim().is_empty() {
            writer.write_all(format!("{}\n", self.handle(first.trim_end())).as_bytes())?;
            writer.flush()?;
        }
        self.serve_lines(reader, writer)
    }

    fn serve_http<R: BufRead>(&self, mut reader: R, mut writer: TcpStream) -> io::Result<()> {
        let mut length = 0;
        loop {
            let mut header = String::new();
            if reader.read_line(&mut header)? == 0 {
                return Ok(());
            }
            let header = header.trim_end();
            if header.is_empty() {
                break;
            }
            if let Some((name, value)) = header.split_once(':') {
                if name.eq_ignore_ascii_case("content-length") {
                    length = value.trim().parse().unwrap_or(0);
                }
            }
        }
        let mut body = vec![0; length];
        reader.read_exact(&mut body)?;
        let reply = self.handle(String::from_utf8_lossy(&body).trim());
        let response = format!(
            "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
            reply.len(),
            reply
        );
        writer.write_all(response.as_bytes())?;
        writer.flush()
    }
}

/// A [`MockScorer`] listening on a loopback TCP port. Each connection
/// speaks either the line protocol or HTTP, decided by its first line.
pub struct MockServer {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl MockServer {
    pub fn spawn(mock: MockScorer) -> io::Result<Self> {
        Self::bind("127.0.0.1:0", mock)
    }

    pub fn bind(addr: &str, mock: MockScorer) -> io::Result<Self> {
        let listener = TcpListener::bind(addr)?;
        let addr = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let mock = Arc::new(mock);
        let flag = Arc::clone(&stop);
        let handle = std::thread::spawn(move || {
            for stream in listener.incoming() {
                if flag.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = stream else { continue };
                let mock = Arc::clone(&mock);
                std::thread::spawn(move || {
                    let _ = mock.serve_connection(stream);
                });
            }
        });
        Ok(Self {
            addr,
            stop,
            handle: Some(handle),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn endpoint(&self) -> Endpoint {
        Endpoint::Tcp(self.addr.to_string())
    }

    /// Blocks until the accept loop ends (it only ends on drop).
    pub fn join(mut self) {
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // Wake the accept loop.
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}
