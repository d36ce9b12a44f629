//! Newline-delimited JSON protocol for external token scorers.
//!
//! Each request is one JSON object on one line, answered by one line:
//!
//! ```text
//! {"id": 7, "op": "score_batch", "windows": [{"context": [1, 2], "target": 3}]}
//! {"id": 7, "log2p": [-1.25]}
//! {"op": "tokenize", "text": "x = 1"}
//! {"ids": [87, 32, 61, 32, 49]}
//! {"op": "info"}
//! {"vocab_size": 256, "name": "mock"}
//! ```
//!
//! Any reply may instead be `{"error": "..."}`. `log2p` must align with
//! `windows` and hold finite values no greater than zero. The same bodies
//! can also be sent as an HTTP `POST /score`.

mod check;
mod client;
pub mod mock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use check::{check_endpoint, CheckReport, CheckStep};
pub use client::{Endpoint, ScorerClient, Transport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub context: Vec<u32>,
    pub target: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Request {
    ScoreBatch {
        id: u64,
        windows: Vec<Window>,
    },
    Tokenize {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<u64>,
        text: String,
    },
    Info {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReply {
    pub id: u64,
    pub log2p: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizeReply {
    pub ids: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfoReply {
    pub vocab_size: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReply {
    pub error: String,
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("invalid scorer endpoint `{0}` (expected tcp://host:port, http://host:port[/path] or exec:command)")]
    Endpoint(String),
    #[error("cannot reach scorer at {endpoint}: {source}")]
    Connect {
        endpoint: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scorer transport: {0}")]
    Transport(#[from] std::io::Error),
    #[error("scorer closed the connection")]
    Closed,
    #[error("scorer HTTP status {0}")]
    HttpStatus(u16),
    #[error("malformed scorer reply ({reason}): {excerpt}")]
    Malformed { reason: String, excerpt: String },
    #[error("scorer returned {got} values for {expected} windows")]
    Misaligned { expected: usize, got: usize },
    #[error("scorer answered request {got}, expected {expected}")]
    IdMismatch { expected: u64, got: u64 },
    #[error("scorer returned log2p[{index}] = {value}; values must be finite and <= 0")]
    InvalidValue { index: usize, value: f64 },
    #[error("scorer token id {id} is outside its vocabulary of {vocab_size}")]
    TokenOutOfRange { id: u32, vocab_size: usize },
    #[error("scorer error: {0}")]
    Remote(String),
}

impl ProtocolError {
    /// Failures worth retrying on a fresh attempt.
    pub fn is_transport(&self) -> bool {
        matches!(
            self,
            ProtocolError::Transport(_) | ProtocolError::Closed | ProtocolError::Connect { .. }
        )
    }

    pub(crate) fn malformed(reason: impl Into<String>, payload: &str) -> Self {
        const MAX: usize = 160;
        let excerpt = match payload.char_indices().nth(MAX) {
            Some((cut, _)) => format!("{}...", &payload[..cut]),
            None => payload.to_string(),
        };
        ProtocolError::Malformed {
            reason: reason.into(),
            excerpt,
        }
    }
}

/// Parses a reply line, surfacing `{"error": ...}` replies first.
pub(crate) fn parse_reply<T: for<'de> Deserialize<'de>>(line: &str) -> Result<T, ProtocolError> {
    let value: serde_json::Value = serde_json::from_str(line)
        .map_err(|e| ProtocolError::malformed(e.to_string(), line))?;
    if let Some(err) = value.get("error") {
        return Err(ProtocolError::Remote(
            err.as_str().map_or_else(|| err.to_string(), str::to_string),
        ));
    }
    serde_json::from_value(value).map_err(|e| ProtocolError::malformed(e.to_string(), line))
}

/// Checks a score reply against its request.
pub fn validate_scores(request_id: u64, windows: usize, reply: &ScoreReply) -> Result<(), ProtocolError> {
    if reply.id != request_id {
        return Err(ProtocolError::IdMismatch {
            expected: request_id,
            got: reply.id,
        });
    }
    if reply.log2p.len() != windows {
        return Err(ProtocolError::Misaligned {
            expected: windows,
            got: reply.log2p.len(),
        });
    }
    if let Some((index, &value)) = reply
        .log2p
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v > 0.0)
    {
        return Err(ProtocolError::InvalidValue { index, value });
    }
    Ok(())
}
