//! Sliding-window perplexity.
//!
//! A file of `N` tokens is scored at positions `ctx..N`, each token seen
//! with the `ctx - 1` tokens before it; the first `ctx` tokens only serve
//! as context. Perplexity is `2^(-sum log2 p / n_scored)`.

mod context;
mod ngram;
mod scorers;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use context::{configure_context, ContextChoice, DEFAULT_CANDIDATES};
pub use ngram::{ngram_train, NgramModel};
pub use scorers::{ExternalScorer, FixedScorer, UniformScorer};

use crate::corpus::FileKey;
use crate::protocol::ProtocolError;
use crate::tokenize::TokenSequence;

pub const DEFAULT_SEED: u64 = 13;
pub const MAX_ATTEMPTS: usize = 3;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid engine configuration: {0}")]
    Config(String),
    #[error("no candidate context size fits: threshold {threshold} is below the smallest candidate {smallest}")]
    NoContextFits { threshold: f64, smallest: usize },
    #[error("n-gram order {order} exceeds every training sequence (longest {longest})")]
    OrderTooLarge { order: usize, longest: usize },
    #[error("sequence of {len} tokens is shorter than the required {required} (ctx {ctx_size})")]
    TooShort { len: usize, required: usize, ctx_size: usize },
    #[error("scorer `{scorer}` has vocabulary {scorer_vocab}, token {token} is out of range")]
    VocabMismatch { scorer: String, scorer_vocab: usize, token: u32 },
    #[error("position {position}: {source}")]
    Score {
        position: usize,
        #[source]
        source: ScoreError,
    },
}

impl EngineError {
    fn is_transport(&self) -> bool {
        matches!(self, EngineError::Score { source: ScoreError::Protocol(p), .. } if p.is_transport())
    }
}

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("scorer returned log2 probability {0}, which is not a probability")]
    Invalid(f64),
    #[error("scorer returned {got} values for {expected} windows")]
    Misaligned { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    Uniform,
    Ngram,
    External,
    /// Constant log-probability; used for calibration and tests.
    Fixed,
}

impl fmt::Display for ScorerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScorerKind::Uniform => "uniform",
            ScorerKind::Ngram => "ngram",
            ScorerKind::External => "external",
            ScorerKind::Fixed => "fixed",
        })
    }
}

impl FromStr for ScorerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "ngram" => Ok(Self::Ngram),
            "external" => Ok(Self::External),
            "fixed" => Ok(Self::Fixed),
            other => Err(format!("unknown scorer kind `{other}`")),
        }
    }
}

/// A source of conditional token log-probabilities (base 2).
pub trait Scorer: Sync {
    fn id(&self) -> &str;

    fn kind(&self) -> ScorerKind;

    fn vocab_size(&self) -> usize;

    fn score(&self, context: &[u32], target: u32) -> Result<f64, ScoreError>;

    fn score_batch(&self, windows: &[(&[u32], u32)]) -> Result<Vec<f64>, ScoreError> {
        windows.iter().map(|(c, t)| self.score(c, *t)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub ctx_size: usize,
    pub stride: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub candidate_ctx: Vec<usize>,
}

impl EngineConfig {
    /// Stride 1, batch size equal to the context size, seed 13.
    pub fn new(ctx_size: usize) -> Self {
        Self {
            ctx_size,
            stride: 1,
            batch_size: ctx_size,
            seed: DEFAULT_SEED,
            candidate_ctx: DEFAULT_CANDIDATES.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.ctx_size == 0 {
            return Err(EngineError::Config("ctx_size must be at least 1".into()));
        }
        if self.stride == 0 || self.stride > self.ctx_size {
            return Err(EngineError::Config(format!(
                "stride must be between 1 and ctx_size ({}), got {}",
                self.ctx_size, self.stride
            )));
        }
        if self.batch_size == 0 {
            return Err(EngineError::Config("batch_size must be at least 1".into()));
        }
        context::check_candidates(&self.candidate_ctx)
    }

    /// Shortest sequence `file_perplexity` accepts.
    pub fn min_tokens(&self) -> usize {
        2 * self.ctx_size
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileScore {
    pub source: FileKey,
    pub scorer_id: String,
    pub n_tokens: usize,
    pub n_scored: usize,
    pub sum_log2p: f64,
    pub perplexity: f64,
}

/// Compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSum {
    pub n_scored: usize,
    pub sum_log2p: f64,
}

impl WindowSum {
    pub fn perplexity(&self) -> f64 {
        (-self.sum_log2p / self.n_scored as f64).exp2()
    }
}

/// First context token for the prediction at `pos`. Predictions are grouped
/// into blocks of `stride` starting at `first`; a block shares one window
/// of `ctx` tokens ending at the block's last target, so with stride 1
/// every prediction sees `min(pos, ctx - 1)` tokens.
pub fn context_start(pos: usize, first: usize, ctx: usize, stride: usize) -> usize {
    let block = first + (pos - first) / stride * stride;
    (block + stride).saturating_sub(ctx)
}

/// Scores positions `first..len` with windows of at most `ctx` tokens,
/// sending `batch` predictions per scorer call.
pub fn sliding_window(
    ids: &[u32],
    scorer: &dyn Scorer,
    ctx: usize,
    stride: usize,
    first: usize,
    batch: usize,
) -> Result<WindowSum, EngineError> {
    let vocab = scorer.vocab_size();
    if let Some(&token) = ids.iter().find(|&&t| t as usize >= vocab) {
        return Err(EngineError::VocabMismatch { scorer: scorer.id().to_string(), scorer_vocab: vocab, token });
    }
    let mut acc = KahanSum::default();
    let positions: Vec<usize> = (first..ids.len()).collect();
    for chunk in positions.chunks(batch.max(1)) {
        let windows: Vec<(&[u32], u32)> = chunk
            .iter()
            .map(|&i| (&ids[context_start(i, first, ctx, stride)..i], ids[i]))
            .collect();
        let values = scorer
            .score_batch(&windows)
            .map_err(|source| EngineError::Score { position: chunk[0], source })?;
        if values.len() != windows.len() {
            return Err(EngineError::Score {
                position: chunk[0],
                source: ScoreError::Misaligned { expected: windows.len(), got: values.len() },
            });
        }
        for (&pos, &v) in chunk.iter().zip(&values) {
            if !v.is_finite() || v > 0.0 {
                return Err(EngineError::Score { position: pos, source: ScoreError::Invalid(v) });
            }
            acc.add(v);
        }
    }
    Ok(WindowSum { n_scored: positions.len(), sum_log2p: acc.value() })
}

/// Perplexity of one file. Requires at least `2 * ctx_size` tokens and
/// scores the `N - ctx_size` tokens after the first window.
pub fn file_perplexity(
    tokens: &TokenSequence,
    scorer: &dyn Scorer,
    cfg: &EngineConfig,
) -> Result<FileScore, EngineError> {
    cfg.validate()?;
    let n = tokens.ids.len();
    if n < cfg.min_tokens() {
        return Err(EngineError::TooShort { len: n, required: cfg.min_tokens(), ctx_size: cfg.ctx_size });
    }
    let w = sliding_window(&tokens.ids, scorer, cfg.ctx_size, cfg.stride, cfg.ctx_size, cfg.batch_size)?;
    Ok(FileScore {
        source: tokens.source.clone(),
        scorer_id: scorer.id().to_string(),
        n_tokens: n,
        n_scored: w.n_scored,
        sum_log2p: w.sum_log2p,
        perplexity: w.perplexity(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileFailure {
    pub source: FileKey,
    pub attempts: usize,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BatchResult {
    pub scores: Vec<FileScore>,
    pub failures: Vec<FileFailure>,
}

/// Scores files on a pool of `workers` threads. Transport errors are
/// retried up to [`MAX_ATTEMPTS`] times; any remaining failure is recorded
/// and the rest of the batch continues. Both lists come back sorted by
/// (language, project, path).
pub fn batch_perplexity(
    files: &[TokenSequence],
    scorer: &dyn Scorer,
    cfg: &EngineConfig,
    workers: usize,
) -> Result<BatchResult, EngineError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| EngineError::Config(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Result<FileScore, FileFailure>> = pool.install(|| {
        files
            .par_iter()
            .map(|f| {
                let mut attempts = 0;
                loop {
                    attempts += 1;
                    match file_perplexity(f, scorer, cfg) {
                        Ok(s) => return Ok(s),
                        Err(e) if e.is_transport() && attempts < MAX_ATTEMPTS => continue,
                        Err(e) => {
                            return Err(FileFailure { source: f.source.clone(), attempts, error: e.to_string() })
                        }
                    }
                }
            })
            .collect()
    });
    let mut result = BatchResult::default();
    for o in outcomes {
        match o {
            Ok(s) => result.scores.push(s),
            Err(f) => result.failures.push(f),
        }
    }
    result.scores.sort_by(|a, b| a.source.cmp(&b.source));
    result.failures.sort_by(|a, b| a.source.cmp(&b.source));
    Ok(result)
}
