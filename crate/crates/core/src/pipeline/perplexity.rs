use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use super::{at, fail, grammars, manifest, project_roots, resolve_endpoint, scores_file_name, PipelineError};
use crate::clean::clean_source;
use crate::config::{RunConfig, ScorerConfig};
use crate::corpus::{
    corpus_digest, read_sample_csv, size_filter, stratified_sample, write_sample_csv, FileKey, SampleSpec,
    SampleStage, SourceFile,
};
use crate::engine::{
    batch_perplexity, configure_context, ngram_train, BatchResult, ContextChoice, ExternalScorer, FixedScorer,
    Scorer, ScorerKind, UniformScorer,
};
use crate::protocol::ScorerClient;
use crate::report::{write_csv, write_scores, write_token_stats, RunRecord};
use crate::rng::SplitMix64;
use crate::tokenize::{
    encode, group_by_language, token_stats, ByteTokenizer, ExternalTokenizer, TokenCache, TokenSequence,
    TokenStats, Tokenizer, TokenizerDescriptor, TokenizerKind, WhitespaceTokenizer,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextInfo {
    pub ctx_size: usize,
    pub stride: usize,
    /// `override` when the context size came from the config or flags.
    pub source: &'static str,
    pub derived: Option<ContextChoice>,
}

#[derive(Debug, Clone)]
pub struct ScorerRun {
    pub scorer_id: String,
    pub kind: ScorerKind,
    pub vocab_size: usize,
    pub trained_on: usize,
    pub scores_csv: PathBuf,
    pub result: BatchResult,
}

#[derive(Debug, Clone)]
pub struct PerplexityOutcome {
    pub out_dir: PathBuf,
    pub tokenizer: TokenizerDescriptor,
    pub context: ContextInfo,
    pub token_stats: BTreeMap<String, TokenStats>,
    /// Files removed by the size filter.
    pub too_short: usize,
    /// Files that could not be cleaned or tokenized, with the reason.
    pub skipped: Vec<(FileKey, String)>,
    pub runs: Vec<ScorerRun>,
    pub corpus_digest: String,
}

/// Loads the sampled files, cleans and tokenizes them, fixes the context
/// size, size-filters (and optionally resamples), then scores with every
/// configured scorer.
pub fn cmd_perplexity(cfg: &RunConfig) -> Result<PerplexityOutcome, PipelineError> {
    if cfg.scorers.is_empty() {
        return Err(fail("config", "no [[scorer]] entries configured"));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().map_err(at("workers"))?;
    let files = load_sample(cfg)?;
    let digest = corpus_digest(files.iter().map(|f| f.content_hash.as_str()));
    let grammars = grammars(cfg)?;

    let cleaned: Vec<Result<String, String>> = pool.install(|| {
        files
            .par_iter()
            .map(|f| clean_source(f, &grammars, cfg.clean_mode).map(|r| r.cleaned.text).map_err(|e| e.to_string()))
            .collect()
    });

    let tok_client = match (&cfg.tokenizer.kind, &cfg.tokenizer.scorer) {
        (TokenizerKind::External, Some(sid)) => {
            let endpoint = resolve_endpoint(Some(cfg), sid)?;
            Some(ScorerClient::connect(&endpoint).map_err(at("connect"))?)
        }
        _ => None,
    };
    let mut tokenizer = build_tokenizer(cfg, tok_client.as_ref())?;
    let descriptor = tokenizer.descriptor().clone();
    let cache = tokenizer.is_stable().then(|| TokenCache::new(cfg.cache_dir().join(cfg.clean_mode.to_string())));

    let mut skipped = Vec::new();
    let mut kept_files = Vec::new();
    let mut sequences = Vec::new();
    for (file, text) in files.into_iter().zip(cleaned) {
        let text = match text {
            Ok(t) => t,
            Err(e) => {
                skipped.push((file.key(), e));
                continue;
            }
        };
        let cached = cache.as_ref().and_then(|c| c.get(&file.content_hash, &descriptor.id));
        let ids = match cached {
            Some(ids) if ids.iter().all(|&t| (t as usize) < descriptor.vocab_size) => ids,
            _ => match encode(&text, tokenizer.as_mut(), file.key()) {
                Ok(seq) => {
                    if let Some(c) = &cache {
                        c.put(&file.content_hash, &descriptor.id, &file.key().to_string(), &seq.ids)
                            .map_err(at("token cache"))?;
                    }
                    seq.ids
                }
                Err(e) => {
                    skipped.push((file.key(), e.to_string()));
                    continue;
                }
            },
        };
        let mut file = file;
        file.token_count = Some(ids.len());
        sequences.push(TokenSequence { tokenizer_id: descriptor.id.clone(), ids, source: file.key() });
        kept_files.push(file);
    }
    if sequences.is_empty() {
        return Err(fail("tokenize", "no file could be tokenized"));
    }
    let stats = token_stats(&group_by_language(&sequences)).map_err(at("token stats"))?;

    let stride = cfg.engine.stride();
    let context = match cfg.engine.ctx_size {
        Some(ctx) => ContextInfo { ctx_size: ctx, stride, source: "override", derived: None },
        None => {
            let min_median = stats.values().map(|s| s.median_tokens).fold(f64::INFINITY, f64::min);
            let choice = configure_context(min_median, stride, &cfg.engine.candidates()).map_err(at("context"))?;
            ContextInfo { ctx_size: choice.ctx_size, stride, source: "derived", derived: Some(choice) }
        }
    };

    let long_enough = size_filter(&kept_files, context.ctx_size).map_err(at("size filter"))?;
    let too_short = kept_files.len() - long_enough.len();
    let out_dir = cfg.perplexity_dir();
    std::fs::create_dir_all(&out_dir).map_err(at("write"))?;
    let selected = match cfg.sample.second_stage {
        Some(n) => {
            let spec = SampleSpec::new(n, cfg.seed, SampleStage::Second);
            let second = stratified_sample(&long_enough, &spec).map_err(at("second sample"))?;
            let f = std::fs::File::create(out_dir.join("sample.second.csv")).map_err(at("write"))?;
            write_sample_csv(f, &second).map_err(at("write"))?;
            second
        }
        None => long_enough,
    };
    let wanted: std::collections::BTreeSet<FileKey> = selected.iter().map(SourceFile::key).collect();
    let scored: Vec<TokenSequence> = sequences.iter().filter(|s| wanted.contains(&s.source)).cloned().collect();

    let engine = cfg.engine.engine_config(context.ctx_size, cfg.seed);
    let single = cfg.scorers.len() == 1;
    let mut runs = Vec::new();
    for sc in &cfg.scorers {
        let (train, eval) = match sc.kind {
            ScorerKind::Ngram => holdout_split(&scored, sc.train_fraction(), cfg.seed),
            _ => (Vec::new(), scored.iter().collect()),
        };
        let scorer = build_scorer(sc, &descriptor, &train, cfg)?;
        if scorer.vocab_size() != descriptor.vocab_size {
            return Err(fail(
                "scorer",
                format!(
                    "scorer `{}` has vocabulary {} but tokenizer `{}` has {}",
                    sc.id,
                    scorer.vocab_size(),
                    descriptor.id,
                    descriptor.vocab_size
                ),
            ));
        }
        let eval_owned: Vec<TokenSequence> = eval.into_iter().cloned().collect();
        let result = batch_perplexity(&eval_owned, scorer.as_ref(), &engine, cfg.workers).map_err(at("score"))?;
        let scores_csv = out_dir.join(scores_file_name(&sc.id, single));
        write_scores(&scores_csv, &result.scores).map_err(at("write"))?;
        runs.push(ScorerRun {
            scorer_id: sc.id.clone(),
            kind: sc.kind,
            vocab_size: scorer.vocab_size(),
            trained_on: train.len(),
            scores_csv,
            result,
        });
    }

    write_token_stats(&out_dir.join("token_stats.csv"), &stats).map_err(at("write"))?;
    let failure_rows: Vec<Vec<String>> = runs
        .iter()
        .flat_map(|r| {
            r.result.failures.iter().map(move |f| {
                vec![
                    r.scorer_id.clone(),
                    f.source.path.clone(),
                    f.source.project.clone(),
                    f.source.language.clone(),
                    f.attempts.to_string(),
                    f.error.clone(),
                ]
            })
        })
        .chain(skipped.iter().map(|(k, e)| {
            vec![String::new(), k.path.clone(), k.project.clone(), k.language.clone(), "1".into(), e.clone()]
        }))
        .collect();
    let failures_csv = out_dir.join("failures.csv");
    if failure_rows.is_empty() {
        let _ = std::fs::remove_file(&failures_csv);
    } else {
        write_csv(&failures_csv, &["scorer", "file", "project", "language", "attempts", "error"], &failure_rows)
            .map_err(at("write"))?;
    }

    let mut run = RunRecord::new("perplexity", cfg.seed, cfg).map_err(at("run.json"))?;
    run.corpus_digest = Some(digest.clone());
    let details: [(&str, serde_json::Value); 6] = [
        ("tokenizer", serde_json::to_value(&descriptor).map_err(at("run.json"))?),
        ("clean_mode", serde_json::json!(cfg.clean_mode)),
        ("context", serde_json::to_value(&context).map_err(at("run.json"))?),
        (
            "engine",
            serde_json::json!({
                "ctx_size": engine.ctx_size,
                "stride": engine.stride,
                "batch_size": engine.batch_size,
                "min_tokens_to_score": engine.min_tokens(),
                "size_filter_min_tokens": 3 * engine.ctx_size,
                "scored_positions": "ctx_size..N, each with ctx_size - 1 context tokens",
            }),
        ),
        (
            "files",
            serde_json::json!({
                "sampled": kept_files.len() + skipped.len(),
                "skipped": skipped.len(),
                "too_short": too_short,
                "selected": scored.len(),
            }),
        ),
        (
            "scorers",
            serde_json::Value::Array(
                runs.iter()
                    .map(|r| {
                        serde_json::json!({
                            "id": r.scorer_id,
                            "kind": r.kind,
                            "vocab_size": r.vocab_size,
                            "trained_on": r.trained_on,
                            "scored": r.result.scores.len(),
                            "failed": r.result.failures.len(),
                            "scores": r.scores_csv.file_name().map(|n| n.to_string_lossy().into_owned()),
                        })
                    })
                    .collect(),
            ),
        ),
    ];
    for (k, v) in details {
        run.set(k, v).map_err(at("run.json"))?;
    }
    run.write(&out_dir.join("run.json")).map_err(at("run.json"))?;

    Ok(PerplexityOutcome {
        out_dir,
        tokenizer: descriptor,
        context,
        token_stats: stats,
        too_short,
        skipped,
        runs,
        corpus_digest: digest,
    })
}

/// Reads the sample CSV and the sampled files, checking every content hash.
fn load_sample(cfg: &RunConfig) -> Result<Vec<SourceFile>, PipelineError> {
    let path = cfg.sample_csv();
    let f = std::fs::File::open(&path).map_err(|e| fail("sample", format!("{}: {e}", path.display())))?;
    let records = read_sample_csv(f).map_err(at("sample"))?;
    let (projects, _) = manifest(cfg)?;
    let roots = project_roots(&projects);
    let mut files = Vec::with_capacity(records.len());
    for r in records {
        let root = roots
            .get(r.project.as_str())
            .ok_or_else(|| fail("sample", format!("project `{}` is not in the manifest", r.project)))?;
        let abs = root.join(&r.path);
        let bytes = std::fs::read(&abs).map_err(|e| fail("read", format!("{}: {e}", abs.display())))?;
        let file = SourceFile::new(&r.project, &r.path, &r.language, bytes);
        if file.content_hash != r.content_hash {
            return Err(fail("read", format!("{}: content changed since sampling", abs.display())));
        }
        files.push(file);
    }
    files.sort_by_key(SourceFile::key);
    Ok(files)
}

/// Splits each language's files into a training share and a held-out
/// share, shuffling with a stream derived from the seed and language.
/// A zero fraction trains on every file and scores every file.
pub fn holdout_split(seqs: &[TokenSequence], train_fraction: f64, seed: u64) -> (Vec<&TokenSequence>, Vec<&TokenSequence>) {
    if train_fraction <= 0.0 {
        let all: Vec<&TokenSequence> = seqs.iter().collect();
        return (all.clone(), all);
    }
    let mut by_lang: BTreeMap<&str, Vec<&TokenSequence>> = BTreeMap::new();
    for s in seqs {
        by_lang.entry(&s.source.language).or_default().push(s);
    }
    let (mut train, mut eval) = (Vec::new(), Vec::new());
    for (lang, mut group) in by_lang {
        group.sort_by(|a, b| a.source.cmp(&b.source));
        let mut rng = SplitMix64::derive(seed, &format!("holdout/{lang}"));
        rng.shuffle(&mut group);
        let n = group.len();
        let k = if n < 2 { n } else { ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1) };
        train.extend_from_slice(&group[..k]);
        eval.extend_from_slice(&group[k..]);
    }
    train.sort_by(|a, b| a.source.cmp(&b.source));
    eval.sort_by(|a, b| a.source.cmp(&b.source));
    (train, eval)
}

fn build_tokenizer<'c>(cfg: &RunConfig, client: Option<&'c ScorerClient>) -> Result<Box<dyn Tokenizer + 'c>, PipelineError> {
    let id = cfg.tokenizer.id();
    Ok(match cfg.tokenizer.kind {
        TokenizerKind::Byte => Box::new(ByteTokenizer::new()),
        TokenizerKind::Whitespace => {
            Box::new(WhitespaceTokenizer::new(&id, cfg.tokenizer.whitespace_vocab()).map_err(at("tokenizer"))?)
        }
        TokenizerKind::External => {
            let client = client.ok_or_else(|| fail("tokenizer", "external tokenizer has no connection"))?;
            Box::new(ExternalTokenizer::connect(&id, client).map_err(at("tokenizer"))?)
        }
    })
}

fn build_scorer(
    sc: &ScorerConfig,
    tok: &TokenizerDescriptor,
    train: &[&TokenSequence],
    cfg: &RunConfig,
) -> Result<Box<dyn Scorer>, PipelineError> {
    Ok(match sc.kind {
        ScorerKind::Uniform => Box::new(UniformScorer::new(&sc.id, tok.vocab_size)),
        ScorerKind::Fixed => Box::new(FixedScorer::new(&sc.id, tok.vocab_size, sc.log2p.expect("validated"))),
        ScorerKind::Ngram => Box::new(
            ngram_train(&sc.id, train, sc.order(), sc.smoothing(), tok.vocab_size).map_err(at("train"))?,
        ),
        ScorerKind::External => {
            let endpoint = resolve_endpoint(Some(cfg), &sc.id)?;
            let n = sc.connections.unwrap_or(cfg.workers).max(1);
            Box::new(ExternalScorer::connect(&sc.id, &endpoint, n).map_err(at("connect"))?)
        }
    })
}
