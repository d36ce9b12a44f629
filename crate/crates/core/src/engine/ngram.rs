//! Add-k smoothed n-gram model with longest-suffix backoff.
//!
//! Contexts live in a trie keyed by the preceding tokens read right to
//! left, so one walk from the root visits every suffix of a context.

use std::collections::HashMap;

use super::{EngineError, ScoreError, Scorer, ScorerKind};
use crate::tokenize::TokenSequence;

#[derive(Debug, Clone)]
pub struct NgramModel {
    id: String,
    order: usize,
    k: f64,
    vocab_size: usize,
    /// Number of occurrences of each node's context followed by any token.
    totals: Vec<u64>,
    children: HashMap<(u32, u32), u32>,
    next: HashMap<(u32, u32), u64>,
}

const ROOT: u32 = 0;

impl NgramModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn smoothing(&self) -> f64 {
        self.k
    }

    pub fn node_count(&self) -> usize {
        self.totals.len()
    }

    /// Deepest trie node matching a suffix of `context`, at most
    /// `order - 1` tokens long.
    fn deepest(&self, context: &[u32]) -> u32 {
        let mut node = ROOT;
        for &t in context.iter().rev().take(self.order - 1) {
            match self.children.get(&(node, t)) {
                Some(&child) => node = child,
                None => break,
            }
        }
        node
    }

    /// `(count(ctx, target), count(ctx))` at the context actually used.
    pub fn counts(&self, context: &[u32], target: u32) -> (u64, u64) {
        let node = self.deepest(context);
        (self.next.get(&(node, target)).copied().unwrap_or(0), self.totals[node as usize])
    }

    pub fn prob(&self, context: &[u32], target: u32) -> f64 {
        let (c, total) = self.counts(context, target);
        (c as f64 + self.k) / (total as f64 + self.k * self.vocab_size as f64)
    }
}

/// Counts every context of length `0..order` preceding every token.
pub fn ngram_train(
    id: &str,
    corpus: &[&TokenSequence],
    order: usize,
    smoothing: f64,
    vocab_size: usize,
) -> Result<NgramModel, EngineError> {
    if order == 0 {
        return Err(EngineError::Config("n-gram order must be at least 1".into()));
    }
    if !(smoothing > 0.0 && smoothing.is_finite()) {
        return Err(EngineError::Config(format!("smoothing constant must be positive, got {smoothing}")));
    }
    if vocab_size < 2 {
        return Err(EngineError::Config("vocabulary size must be at least 2".into()));
    }
    if corpus.is_empty() {
        return Err(EngineError::Config("n-gram training corpus is empty".into()));
    }
    if corpus.iter().all(|s| s.ids.len() < order) {
        return Err(EngineError::OrderTooLarge { order, longest: corpus.iter().map(|s| s.ids.len()).max().unwrap_or(0) });
    }
    let mut m = NgramModel {
        id: id.to_string(),
        order,
        k: smoothing,
        vocab_size,
        totals: vec![0],
        children: HashMap::new(),
        next: HashMap::new(),
    };
    for seq in corpus {
        let ids = &seq.ids;
        for (i, &target) in ids.iter().enumerate() {
            if target as usize >= vocab_size {
                return Err(EngineError::Config(format!(
                    "token {target} in {} exceeds vocabulary {vocab_size}",
                    seq.source
                )));
            }
            let mut node = ROOT;
            m.totals[0] += 1;
            *m.next.entry((ROOT, target)).or_default() += 1;
            for back in 1..order.min(i + 1) {
                let t = ids[i - back];
                let fresh = m.totals.len() as u32;
                node = *m.children.entry((node, t)).or_insert(fresh);
                if node == fresh {
                    m.totals.push(0);
                }
                m.totals[node as usize] += 1;
                *m.next.entry((node, target)).or_default() += 1;
            }
        }
    }
    Ok(m)
}

impl Scorer for NgramModel {
    fn id(&self) -> &str {
        &self.id
    }

    fn kind(&self) -> ScorerKind {
        ScorerKind::Ngram
    }

    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn score(&self, context: &[u32], target: u32) -> Result<f64, ScoreError> {
        Ok(self.prob(context, target).log2())
    }
}
