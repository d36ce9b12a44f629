//! Trains byte-level n-gram models on half of the bundled corpus and scores
//! the other half, next to the uniform baseline.
//!
//!     cargo run --release --example ngram_perplexity

use std::path::Path;

use codeppl::analysis::median;
use codeppl::engine::{file_perplexity, ngram_train, EngineConfig, Scorer, UniformScorer};
use codeppl::tokenize::{encode, ByteTokenizer, TokenSequence};
use codeppl::FileKey;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus");
    let mut tok = ByteTokenizer::new();
    let mut seqs = Vec::new();
    for entry in walkdir::WalkDir::new(&root).sort_by_file_name() {
        let entry = entry?;
        if !entry.file_type().is_file() {
            continue;
        }
        let text = std::fs::read_to_string(entry.path())?;
        let rel = entry.path().strip_prefix(&root)?.display().to_string();
        let key = FileKey { language: String::new(), project: String::new(), path: rel };
        seqs.push(encode(&text, &mut tok, key)?);
    }

    let (train, eval): (Vec<(usize, &TokenSequence)>, Vec<(usize, &TokenSequence)>) =
        seqs.iter().enumerate().partition(|(i, _)| i % 2 == 0);
    let train: Vec<&TokenSequence> = train.into_iter().map(|(_, s)| s).collect();
    let cfg = EngineConfig::new(32);
    println!("{} training files, {} evaluation files, ctx_size {}", train.len(), eval.len(), cfg.ctx_size);

    let mut scorers: Vec<Box<dyn Scorer>> = vec![Box::new(UniformScorer::new("uniform", 256))];
    for order in [1, 2, 3, 5] {
        scorers.push(Box::new(ngram_train(&format!("{order}-gram"), &train, order, 0.01, 256)?));
    }
    for scorer in &scorers {
        let ppl: Vec<f64> = eval
            .iter()
            .filter(|(_, s)| s.len() >= cfg.min_tokens())
            .map(|(_, s)| file_perplexity(s, scorer.as_ref(), &cfg).map(|f| f.perplexity))
            .collect::<Result<_, _>>()?;
        println!("{:>8}: median perplexity {:8.3} over {} files", scorer.id(), median(&ppl).unwrap_or(f64::NAN), ppl.len());
    }
    Ok(())
}
