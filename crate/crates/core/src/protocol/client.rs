use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use super::{
    parse_reply, validate_scores, InfoReply, ProtocolError, Request, ScoreReply, TokenizeReply,
    Window,
};

const IO_TIMEOUT: Duration = Duration::from_secs(120);

/// Where an external scorer listens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    /// Newline-delimited JSON over a TCP stream.
    Tcp(String),
    /// One HTTP POST per request.
    Http { authority: String, path: String },
    /// A child process speaking the protocol on stdin/stdout.
    Exec(Vec<String>),
}

impl FromStr for Endpoint {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ProtocolError::Endpoint(s.to_string());
        if let Some(addr) = s.strip_prefix("tcp://") {
            if addr.is_empty() || !addr.contains(':') {
                return Err(bad());
            }
            return Ok(Endpoint::Tcp(addr.to_string()));
        }
        if let Some(rest) = s.strip_prefix("http://") {
            let (authority, path) = match rest.find('/') {
                Some(i) => (&rest[..i], &rest[i..]),
                None => (rest, "/score"),
            };
            if authority.is_empty() {
                return Err(bad());
            }
            let authority = if authority.contains(':') {
                authority.to_string()
            } else {
                format!("{authority}:80")
            };
            return Ok(Endpoint::Http {
                authority,
                path: path.to_string(),
            });
        }
        if let Some(cmd) = s.strip_prefix("exec:") {
            let argv: Vec<String> = cmd.split_whitespace().map(String::from).collect();
            if argv.is_empty() {
                return Err(bad());
            }
            return Ok(Endpoint::Exec(argv));
        }
        Err(bad())
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Tcp(addr) => write!(f, "tcp://{addr}"),
            Endpoint::Http { authority, path } => write!(f, "http://{authority}{path}"),
            Endpoint::Exec(argv) => write!(f, "exec:{}", argv.join(" ")),
        }
    }
}

/// Sends one request line and returns the reply line.
pub trait Transport: Send {
    fn round_trip(&mut self, line: &str) -> Result<String, ProtocolError>;
}

struct LineTransport<R, W> {
    reader: R,
    writer: W,
}

impl<R: BufRead + Send, W: Write + Send> Transport for LineTransport<R, W> {
    fn round_trip(&mut self, line: &str) -> Result<String, ProtocolError> {
        let mut framed = String::with_capacity(line.len() + 1);
        framed.push_str(line);
        framed.push('\n');
        self.writer.write_all(framed.as_bytes())?;
        self.writer.flush()?;
        let mut reply = String::new();
        if self.reader.read_line(&mut reply)? == 0 {
            return Err(ProtocolError::Closed);
        }
        Ok(reply.trim_end().to_string())
    }
}

struct ChildTransport {
    child: Child,
    inner: LineTransport<BufReader<ChildStdout>, ChildStdin>,
}

impl Transport for ChildTransport {
    fn round_trip(&mut self, line: &str) -> Result<String, ProtocolError> {
        self.inner.round_trip(line)
    }
}

impl Drop for ChildTransport {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

struct HttpTransport {
    authority: String,
    path: String,
}

impl Transport for HttpTransport {
    fn round_trip(&mut self, line: &str) -> Result<String, ProtocolError> {
        let mut stream = TcpStream::connect(&self.authority)?;
        stream.set_read_timeout(Some(IO_TIMEOUT))?;
        stream.set_nodelay(true)?;
        let request = format!(
            "POST {} HTTP/1.1\r\nHost: {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
            self.path,
            self.authority,
            line.len(),
            line
        );
        stream.write_all(request.as_bytes())?;
        stream.flush()?;
        let mut reader = BufReader::new(stream);
        let mut status = String::new();
        if reader.read_line(&mut status)? == 0 {
            return Err(ProtocolError::Closed);
        }
        let code: u16 = status
            .split_whitespace()
            .nth(1)
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| ProtocolError::malformed("bad HTTP status line", &status))?;
        let mut length = None;
        loop {
            let mut header = String::new();
            if reader.read_line(&mut header)? == 0 {
                return Err(ProtocolError::Closed);
            }
            let header = header.trim_end();
            if header.is_empty() {
                break;
            }
            if let Some((name, value)) = header.split_once(':') {
                if name.eq_ignore_ascii_case("content-length") {
                    length = value.trim().parse::<usize>().ok();
                }
            }
        }
        let mut body = Vec::new();
        match length {
            Some(n) => {
                body.resize(n, 0);
                reader.read_exact(&mut body)?;
            }
            None => {
                reader.read_to_end(&mut body)?;
            }
        }
        let body = String::from_utf8_lossy(&body).trim().to_string();
        if code != 200 && !body.contains("\"error\"") {
            return Err(ProtocolError::HttpStatus(code));
        }
        Ok(body)
    }
}

/// A connection to an external scorer. Requests on one client are
/// serialized; open several clients to score in parallel.
pub struct ScorerClient {
    endpoint: String,
    transport: Mutex<Box<dyn Transport>>,
    next_id: AtomicU64,
}

impl fmt::Debug for ScorerClient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScorerClient").field("endpoint", &self.endpoint).finish()
    }
}

impl ScorerClient {
    pub fn connect(endpoint: &Endpoint) -> Result<Self, ProtocolError> {
        let name = endpoint.to_string();
        let connect_err = |source| ProtocolError::Connect {
            endpoint: name.clone(),
            source,
        };
        let transport: Box<dyn Transport> = match endpoint {
            Endpoint::Tcp(addr) => {
                let stream = TcpStream::connect(addr).map_err(connect_err)?;
                stream.set_read_timeout(Some(IO_TIMEOUT)).map_err(connect_err)?;
                stream.set_nodelay(true).map_err(connect_err)?;
                let reader = BufReader::new(stream.try_clone().map_err(connect_err)?);
                Box::new(LineTransport {
                    reader,
                    writer: stream,
                })
            }
            Endpoint::Http { authority, path } => Box::new(HttpTransport {
                authority: authority.clone(),
                path: path.clone(),
            }),
            Endpoint::Exec(argv) => {
                let mut child = Command::new(&argv[0])
                    .args(&argv[1..])
                    .stdin(Stdio::piped())
                    .stdout(Stdio::piped())
                    .stderr(Stdio::inherit())
                    .spawn()
                    .map_err(connect_err)?;
                let stdin = child.stdin.take().expect("piped stdin");
                let stdout = child.stdout.take().expect("piped stdout");
                Box::new(ChildTransport {
                    child,
                    inner: LineTransport {
                        reader: BufReader::new(stdout),
                        writer: stdin,
                    },
                })
            }
        };
        Ok(Self::from_transport(name, transport))
    }

    pub fn from_transport(endpoint: impl Into<String>, transport: Box<dyn Transport>) -> Self {
        Self {
            endpoint: endpoint.into(),
            transport: Mutex::new(transport),
            next_id: AtomicU64::new(1),
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn send(&self, request: &Request) -> Result<String, ProtocolError> {
        let line = serde_json::to_string(request).expect("requests serialize");
        let mut transport = self.transport.lock().unwrap_or_else(|p| p.into_inner());
        transport.round_trip(&line)
    }

    pub fn info(&self) -> Result<InfoReply, ProtocolError> {
        let reply = self.send(&Request::Info { id: None })?;
        let info: InfoReply = parse_reply(&reply)?;
        if info.vocab_size < 2 {
            return Err(ProtocolError::malformed("vocab_size must be at least 2", &reply));
        }
        Ok(info)
    }

    pub fn tokenize(&self, text: &str) -> Result<Vec<u32>, ProtocolError> {
        let reply = self.send(&Request::Tokenize {
            id: None,
            text: text.to_string(),
        })?;
        Ok(parse_reply::<TokenizeReply>(&reply)?.ids)
    }

    /// log2 probabilities for each window, validated for alignment and
    /// range.
    pub fn score_batch(&self, windows: &[Window]) -> Result<Vec<f64>, ProtocolError> {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let reply = self.send(&Request::ScoreBatch {
            id,
            windows: windows.to_vec(),
        })?;
        let scores: ScoreReply = parse_reply(&reply)?;
        validate_scores(id, windows.len(), &scores)?;
        Ok(scores.log2p)
    }
}
