//! Context-size derivation from the smallest per-language median length.

use serde::Serialize;

use super::EngineError;

pub const DEFAULT_CANDIDATES: [usize; 7] = [8, 16, 32, 64, 128, 256, 512];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContextChoice {
    pub min_median_tokens: f64,
    pub stride: usize,
    /// `(median - stride) / 2`, kept fractional.
    pub threshold: f64,
    /// Largest integer context size the threshold admits.
    pub bound: u64,
    pub ctx_size: usize,
}

/// Largest candidate `c` with `c + stride/2 <= median/2`, i.e.
/// `2c + stride <= median`. Medians are multiples of 0.5, so the
/// comparison is exact in floating point.
pub fn configure_context(
    min_median_tokens: f64,
    stride: usize,
    candidates: &[usize],
) -> Result<ContextChoice, EngineError> {
    if stride == 0 {
        return Err(EngineError::Config("stride must be at least 1".into()));
    }
    check_candidates(candidates)?;
    let threshold = (min_median_tokens - stride as f64) / 2.0;
    let ctx_size = candidates
        .iter()
        .rev()
        .copied()
        .find(|&c| (2 * c + stride) as f64 <= min_median_tokens)
        .ok_or(EngineError::NoContextFits { threshold, smallest: candidates[0] })?;
    Ok(ContextChoice {
        min_median_tokens,
        stride,
        threshold,
        bound: threshold.floor() as u64,
        ctx_size,
    })
}

pub(crate) fn check_candidates(candidates: &[usize]) -> Result<(), EngineError> {
    if candidates.is_empty() || candidates[0] == 0 {
        return Err(EngineError::Config("candidate context sizes must be positive and non-empty".into()));
    }
    if candidates.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EngineError::Config("candidate context sizes must be strictly increasing".into()));
    }
    Ok(())
}
