use super::{InfoReply, ProtocolError, ScorerClient, Window};

const PROBE_TEXT: &str = "def add(x, y):\n    return x + y\n";

#[derive(Debug, Clone, PartialEq)]
pub struct CheckStep {
    pub name: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub info: InfoReply,
    pub steps: Vec<CheckStep>,
}

/// Handshakes a scorer and exercises every request type: `info`,
/// `tokenize` (ids in range and stable across calls), and `score_batch`
/// (one value per window, all finite and <= 0). Stops at the first
/// violation.
pub fn check_endpoint(client: &ScorerClient) -> Result<CheckReport, ProtocolError> {
    let mut steps = Vec::new();

    let info = client.info()?;
    steps.push(CheckStep {
        name: "info",
        detail: format!("name={} vocab_size={}", info.name, info.vocab_size),
    });

    let ids = client.tokenize(PROBE_TEXT)?;
    if let Some(&id) = ids.iter().find(|&&id| id as usize >= info.vocab_size) {
        return Err(ProtocolError::TokenOutOfRange {
            id,
            vocab_size: info.vocab_size,
        });
    }
    if ids.is_empty() {
        return Err(ProtocolError::malformed("tokenize returned no ids", PROBE_TEXT));
    }
    let again = client.tokenize(PROBE_TEXT)?;
    if again != ids {
        return Err(ProtocolError::malformed(
            "tokenize is not deterministic",
            &format!("{ids:?} vs {again:?}"),
        ));
    }
    steps.push(CheckStep {
        name: "tokenize",
        detail: format!("{} ids for {} bytes, stable on repeat", ids.len(), PROBE_TEXT.len()),
    });

    let windows: Vec<Window> = (1..ids.len().min(9))
        .map(|i| Window {
            context: ids[..i].to_vec(),
            target: ids[i],
        })
        .collect();
    let windows = if windows.is_empty() {
        vec![Window {
            context: vec![],
            target: ids[0],
        }]
    } else {
        windows
    };
    let scores = client.score_batch(&windows)?;
    steps.push(CheckStep {
        name: "score_batch",
        detail: format!("{} windows, {} aligned values", windows.len(), scores.len()),
    });

    let single = client.score_batch(&windows[..1])?;
    if (single[0] - scores[0]).abs() > 1e-9 * scores[0].abs().max(1.0) {
        return Err(ProtocolError::malformed(
            "score for a window depends on its batch",
            &format!("{} vs {}", single[0], scores[0]),
        ));
    }
    steps.push(CheckStep {
        name: "batch_independence",
        detail: "single-window batch matches".into(),
    });

    Ok(CheckReport { info, steps })
}
