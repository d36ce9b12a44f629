//! Decoding and comment removal.

mod decode;
mod grammar;
pub mod lexer;
mod strip;

use std::fmt;
use std::ops::Range;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use decode::{detect_and_decode, Decoded, Encoding};
pub use grammar::{BlockDelimiter, CommentGrammar, GrammarSet, StringDelimiter};
pub use strip::{strip_all_comments, strip_header_boilerplate};

use crate::corpus::{FileKey, SourceFile};

#[derive(Debug, Error)]
pub enum CleanError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("grammar file: {0}")]
    Grammar(String),
    #[error("no comment grammar for language `{0}`")]
    NoGrammar(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CleanMode {
    #[serde(rename = "raw")]
    Raw,
    #[serde(rename = "header")]
    HeaderStripped,
    #[serde(rename = "all_comments")]
    AllCommentsStripped,
}

impl fmt::Display for CleanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CleanMode::Raw => "raw",
            CleanMode::HeaderStripped => "header",
            CleanMode::AllCommentsStripped => "all_comments",
        })
    }
}

impl FromStr for CleanMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" => Ok(CleanMode::Raw),
            "header" | "header_stripped" => Ok(CleanMode::HeaderStripped),
            "all_comments" | "all_comments_stripped" => Ok(CleanMode::AllCommentsStripped),
            other => Err(format!(
                "unknown clean mode `{other}` (expected raw, header or all_comments)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanedFile {
    pub origin: Option<FileKey>,
    pub text: String,
    pub mode: CleanMode,
    pub bytes_removed: usize,
    /// Spans of the input that were comments and got removed.
    pub removed_comments: Vec<Range<usize>>,
    pub unterminated_block: bool,
}

impl CleanedFile {
    fn unchanged(text: &str, mode: CleanMode, unterminated_block: bool) -> Self {
        Self {
            origin: None,
            text: text.to_string(),
            mode,
            bytes_removed: 0,
            removed_comments: Vec::new(),
            unterminated_block,
        }
    }
}

/// Cleaning outcome for one corpus file.
#[derive(Debug, Clone)]
pub struct CleanReport {
    pub cleaned: CleanedFile,
    pub encoding: Encoding,
    pub decode_fallback: bool,
}

/// Decodes and cleans a corpus file under the given mode.
pub fn clean_source(
    file: &SourceFile,
    grammars: &GrammarSet,
    mode: CleanMode,
) -> Result<CleanReport, CleanError> {
    let decoded = detect_and_decode(&file.raw_bytes);
    let mut cleaned = clean_text(&decoded.text, grammars.get(&file.language)?, mode);
    cleaned.origin = Some(file.key());
    Ok(CleanReport {
        cleaned,
        encoding: decoded.encoding,
        decode_fallback: decoded.fallback,
    })
}

pub fn clean_text(text: &str, grammar: &CommentGrammar, mode: CleanMode) -> CleanedFile {
    match mode {
        CleanMode::Raw => CleanedFile::unchanged(text, CleanMode::Raw, false),
        CleanMode::HeaderStripped => strip_header_boilerplate(text, grammar),
        CleanMode::AllCommentsStripped => strip_all_comments(text, grammar),
    }
}
