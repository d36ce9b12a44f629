//! Tokenizers and token statistics.
//!
//! Three tokenizer kinds share one contract: `byte` maps UTF-8 bytes to ids
//! 0-255, `whitespace` interns whitespace-separated words in first-seen
//! order, and `external` asks a scorer process through the protocol's
//! `tokenize` request.

mod cache;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cache::{decode_record, encode_record, TokenCache};

use crate::analysis::median;
use crate::corpus::FileKey;
use crate::protocol::{ProtocolError, ScorerClient};

pub const DEFAULT_WHITESPACE_VOCAB: usize = 1 << 16;

#[derive(Debug, Error)]
pub enum TokenizeError {
    #[error(transparent)]
    Transport(#[from] ProtocolError),
    #[error("tokenizer `{id}` produced id {token}, outside its vocabulary of {vocab_size}")]
    OutOfVocabulary {
        id: String,
        token: u32,
        vocab_size: usize,
    },
    #[error("whitespace tokenizer `{id}` exhausted its vocabulary of {vocab_size}")]
    VocabularyExhausted { id: String, vocab_size: usize },
    #[error("language `{0}` has no token sequences")]
    EmptyGroup(String),
    #[error("vocabulary size must be at least 2")]
    VocabTooSmall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenizerKind {
    Byte,
    Whitespace,
    External,
}

impl fmt::Display for TokenizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenizerKind::Byte => "byte",
            TokenizerKind::Whitespace => "whitespace",
            TokenizerKind::External => "external",
        })
    }
}

impl FromStr for TokenizerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "byte" => Ok(Self::Byte),
            "whitespace" => Ok(Self::Whitespace),
            "external" => Ok(Self::External),
            other => Err(format!("unknown tokenizer kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerDescriptor {
    pub id: String,
    pub vocab_size: usize,
    pub kind: TokenizerKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub tokenizer_id: String,
    pub ids: Vec<u32>,
    pub source: FileKey,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn unique_count(&self) -> usize {
        self.ids.iter().collect::<HashSet<_>>().len()
    }
}

pub trait Tokenizer {
    fn descriptor(&self) -> &TokenizerDescriptor;

    fn encode_ids(&mut self, text: &str) -> Result<Vec<u32>, TokenizeError>;

    /// Whether equal text always yields equal ids across runs, which is
    /// what makes on-disk caching sound.
    fn is_stable(&self) -> bool {
        true
    }
}

/// Encodes `text` and checks every id against the vocabulary.
pub fn encode(
    text: &str,
    tokenizer: &mut dyn Tokenizer,
    source: FileKey,
) -> Result<TokenSequence, TokenizeError> {
    let ids = tokenizer.encode_ids(text)?;
    let desc = tokenizer.descriptor();
    if let Some(&token) = ids.iter().find(|&&t| t as usize >= desc.vocab_size) {
        return Err(TokenizeError::OutOfVocabulary {
            id: desc.id.clone(),
            token,
            vocab_size: desc.vocab_size,
        });
    }
    Ok(TokenSequence {
        tokenizer_id: desc.id.clone(),
        ids,
        source,
    })
}

#[derive(Debug, Clone)]
pub struct ByteTokenizer {
    desc: TokenizerDescriptor,
}

impl ByteTokenizer {
    pub fn new() -> Self {
        Self {
            desc: TokenizerDescriptor {
                id: "byte".into(),
                vocab_size: 256,
                kind: TokenizerKind::Byte,
            },
        }
    }
}

impl Default for ByteTokenizer {
    fn default() -> Self {
        Self::new()
    }
}

impl Tokenizer for ByteTokenizer {
    fn descriptor(&self) -> &TokenizerDescriptor {
        &self.desc
    }

    fn encode_ids(&mut self, text: &str) -> Result<Vec<u32>, TokenizeError> {
        Ok(text.bytes().map(u32::from).collect())
    }
}

/// Interns whitespace-separated words. Ids depend on the order texts are
/// encoded in, so one instance must see a run's files in a fixed order.
#[derive(Debug, Clone)]
pub struct WhitespaceTokenizer {
    desc: TokenizerDescriptor,
    table: HashMap<String, u32>,
}

impl WhitespaceTokenizer {
    pub fn new(id: &str, vocab_size: usize) -> Result<Self, TokenizeError> {
        if vocab_size < 2 {
            return Err(TokenizeError::VocabTooSmall);
        }
        Ok(Self {
            desc: TokenizerDescriptor {
                id: id.to_string(),
                vocab_size,
                kind: TokenizerKind::Whitespace,
            },
            table: HashMap::new(),
        })
    }

    pub fn interned(&self) -> usize {
        self.table.len()
    }
}

impl Tokenizer for WhitespaceTokenizer {
    fn descriptor(&self) -> &TokenizerDescriptor {
        &self.desc
    }

    fn encode_ids(&mut self, text: &str) -> Result<Vec<u32>, TokenizeError> {
        let mut ids = Vec::new();
        for word in text.split_whitespace() {
            let next = self.table.len();
            let id = match self.table.get(word) {
                Some(&id) => id,
                None => {
                    if next >= self.desc.vocab_size {
                        return Err(TokenizeError::VocabularyExhausted {
                            id: self.desc.id.clone(),
                            vocab_size: self.desc.vocab_size,
                        });
                    }
                    self.table.insert(word.to_string(), next as u32);
                    next as u32
                }
            };
            ids.push(id);
        }
        Ok(ids)
    }

    fn is_stable(&self) -> bool {
        false
    }
}

/// Tokenizes through an external scorer's `tokenize` request.
#[derive(Debug)]
pub struct ExternalTokenizer<'c> {
    desc: TokenizerDescriptor,
    client: &'c ScorerClient,
}

impl<'c> ExternalTokenizer<'c> {
    /// Reads the vocabulary size from the scorer's `info` reply.
    pub fn connect(id: &str, client: &'c ScorerClient) -> Result<Self, TokenizeError> {
        let info = client.info()?;
        Ok(Self {
            desc: TokenizerDescriptor {
                id: id.to_string(),
                vocab_size: info.vocab_size,
                kind: TokenizerKind::External,
            },
            client,
        })
    }
}

impl Tokenizer for ExternalTokenizer<'_> {
    fn descriptor(&self) -> &TokenizerDescriptor {
        &self.desc
    }

    fn encode_ids(&mut self, text: &str) -> Result<Vec<u32>, TokenizeError> {
        Ok(self.client.tokenize(text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TokenStats {
    pub files: usize,
    pub median_tokens: f64,
    pub median_unique_tokens: f64,
}

/// Median total and unique token counts per language. Unique counts are
/// taken per file before the median.
pub fn token_stats(
    groups: &BTreeMap<String, Vec<&TokenSequence>>,
) -> Result<BTreeMap<String, TokenStats>, TokenizeError> {
    let mut out = BTreeMap::new();
    for (language, seqs) in groups {
        if seqs.is_empty() {
            return Err(TokenizeError::EmptyGroup(language.clone()));
        }
        let totals: Vec<f64> = seqs.iter().map(|s| s.len() as f64).collect();
        let uniques: Vec<f64> = seqs.iter().map(|s| s.unique_count() as f64).collect();
        out.insert(
            language.clone(),
            TokenStats {
                files: seqs.len(),
                median_tokens: median(&totals).expect("non-empty"),
                median_unique_tokens: median(&uniques).expect("non-empty"),
            },
        );
    }
    Ok(out)
}

pub fn group_by_language(seqs: &[TokenSequence]) -> BTreeMap<String, Vec<&TokenSequence>> {
    let mut groups: BTreeMap<String, Vec<&TokenSequence>> = BTreeMap::new();
    for s in seqs {
        groups.entry(s.source.language.clone()).or_default().push(s);
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(lang: &str, path: &str) -> FileKey {
        FileKey {
            language: lang.into(),
            project: "p".into(),
            path: path.into(),
        }
    }

    #[test]
    fn byte_tokenizer() {
        let mut tok = ByteTokenizer::new();
        assert_eq!(encode("ab", &mut tok, key("C", "a")).unwrap().ids, vec![97, 98]);
        assert!(encode("", &mut tok, key("C", "a")).unwrap().ids.is_empty());
        assert_eq!(encode("é", &mut tok, key("C", "a")).unwrap().ids, vec![0xc3, 0xa9]);
    }

    #[test]
    fn whitespace_interning_order() {
        let mut tok = WhitespaceTokenizer::new("ws", 100).unwrap();
        assert_eq!(tok.encode_ids("a b a").unwrap(), vec![0, 1, 0]);
        assert_eq!(tok.encode_ids("c\n\ta").unwrap(), vec![2, 0]);
        assert_eq!(tok.interned(), 3);
    }

    #[test]
    fn whitespace_vocab_exhaustion() {
        let mut tok = WhitespaceTokenizer::new("ws", 2).unwrap();
        assert!(matches!(
            tok.encode_ids("a b c"),
            Err(TokenizeError::VocabularyExhausted { .. })
        ));
    }

    #[test]
    fn medians_and_unique_counts() {
        let seq = |lang: &str, ids: Vec<u32>| TokenSequence {
            tokenizer_id: "t".into(),
            ids,
            source: key(lang, "x"),
        };
        let seqs = vec![
            seq("Ruby", vec![0; 170]),
            seq("C", vec![1]),
            seq("C", vec![5, 5, 7]),
        ];
        let stats = token_stats(&group_by_language(&seqs)).unwrap();
        assert_eq!(stats["Ruby"].median_tokens, 170.0);
        assert_eq!(stats["C"].median_tokens, 2.0);
        assert_eq!(stats["C"].median_unique_tokens, 1.5);
        assert_eq!(seqs[2].unique_count(), 2);
    }

    #[test]
    fn empty_group_named() {
        let mut groups = BTreeMap::new();
        groups.insert("Go".to_string(), Vec::new());
        assert!(matches!(token_stats(&groups), Err(TokenizeError::EmptyGroup(l)) if l == "Go"));
    }
}
