//! Scorers that need no training: uniform, fixed-value, and the external
//! protocol client.

use std::sync::atomic::{AtomicUsize, Ordering};

use super::{ScoreError, Scorer, ScorerKind};
use crate::protocol::{Endpoint, ProtocolError, ScorerClient, Window};

/// Assigns `1/V` to every token.
#[derive(Debug, Clone)]
pub struct UniformScorer {
    id: String,
    vocab_size: usize,
}

impl UniformScorer {
    pub fn new(id: &str, vocab_size: usize) -> Self {
        assert!(vocab_size >= 2, "vocabulary size must be at least 2");
        Self { id: id.to_string(), vocab_size }
    }
}

impl Scorer for UniformScorer {
    fn id(&self) -> &str {
        &self.id
    }

    fn kind(&self) -> ScorerKind {
        ScorerKind::Uniform
    }

    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn score(&self, _context: &[u32], _target: u32) -> Result<f64, ScoreError> {
        Ok(-(self.vocab_size as f64).log2())
    }
}

/// Returns the same log2 probability for every token; `0.0` is a
/// scorer that is always certain.
#[derive(Debug, Clone)]
pub struct FixedScorer {
    id: String,
    vocab_size: usize,
    log2p: f64,
}

impl FixedScorer {
    pub fn new(id: &str, vocab_size: usize, log2p: f64) -> Self {
        Self { id: id.to_string(), vocab_size, log2p }
    }

    pub fn certain(id: &str, vocab_size: usize) -> Self {
        Self::new(id, vocab_size, 0.0)
    }
}

impl Scorer for FixedScorer {
    fn id(&self) -> &str {
        &self.id
    }

    fn kind(&self) -> ScorerKind {
        ScorerKind::Fixed
    }

    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn score(&self, _context: &[u32], _target: u32) -> Result<f64, ScoreError> {
        Ok(self.log2p)
    }
}

/// Scores through one or more protocol connections, handed out round-robin
/// so parallel workers do not queue on a single stream.
#[derive(Debug)]
pub struct ExternalScorer {
    id: String,
    vocab_size: usize,
    name: String,
    pool: Vec<ScorerClient>,
    next: AtomicUsize,
}

impl ExternalScorer {
    pub fn connect(id: &str, endpoint: &Endpoint, connections: usize) -> Result<Self, ProtocolError> {
        let pool = (0..connections.max(1))
            .map(|_| ScorerClient::connect(endpoint))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_clients(id, pool)
    }

    pub fn from_clients(id: &str, pool: Vec<ScorerClient>) -> Result<Self, ProtocolError> {
        let first = pool.first().ok_or_else(|| ProtocolError::Endpoint("empty connection pool".into()))?;
        let info = first.info()?;
        Ok(Self {
            id: id.to_string(),
            vocab_size: info.vocab_size,
            name: info.name,
            pool,
            next: AtomicUsize::new(0),
        })
    }

    /// The model name the scorer reported.
    pub fn model_name(&self) -> &str {
        &self.name
    }

    pub fn client(&self) -> &ScorerClient {
        &self.pool[0]
    }

    fn pick(&self) -> &ScorerClient {
        &self.pool[self.next.fetch_add(1, Ordering::Relaxed) % self.pool.len()]
    }
}

impl Scorer for ExternalScorer {
    fn id(&self) -> &str {
        &self.id
    }

    fn kind(&self) -> ScorerKind {
        ScorerKind::External
    }

    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn score(&self, context: &[u32], target: u32) -> Result<f64, ScoreError> {
        Ok(self.score_batch(&[(context, target)])?[0])
    }

    fn score_batch(&self, windows: &[(&[u32], u32)]) -> Result<Vec<f64>, ScoreError> {
        let owned: Vec<Window> = windows
            .iter()
            .map(|(c, t)| Window { context: c.to_vec(), target: *t })
            .collect();
        Ok(self.pick().score_batch(&owned)?)
    }
}
