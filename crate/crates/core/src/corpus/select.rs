use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CorpusError, SourceFile};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleStage {
    First,
    Second,
}

impl fmt::Display for SampleStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SampleStage::First => "first",
            SampleStage::Second => "second",
        })
    }
}

impl FromStr for SampleStage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first" => Ok(Self::First),
            "second" => Ok(Self::Second),
            other => Err(format!("unknown sample stage `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub per_language_count: usize,
    pub seed: u64,
    pub stage: SampleStage,
}

impl SampleSpec {
    pub fn new(per_language_count: usize, seed: u64, stage: SampleStage) -> Self {
        Self {
            per_language_count,
            seed,
            stage,
        }
    }
}

/// One file per distinct content hash. Among duplicates the file with the
/// smallest (project, path) is kept. Output is sorted by (language,
/// project, path).
pub fn dedup_files(files: &[SourceFile]) -> Vec<SourceFile> {
    let mut by_hash: Vec<&SourceFile> = files.iter().collect();
    by_hash.sort_by(|a, b| {
        (&a.content_hash, &a.project, &a.path).cmp(&(&b.content_hash, &b.project, &b.path))
    });
    by_hash.dedup_by(|later, first| later.content_hash == first.content_hash);
    let mut out: Vec<SourceFile> = by_hash.into_iter().cloned().collect();
    out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    out
}

/// Draws exactly `per_language_count` files per language, spreading the
/// draw over as many projects as possible.
///
/// For each language the files of every project are shuffled, then the
/// projects are visited in rounds (in a freshly shuffled order each round)
/// taking one file per project per round until the quota is met. Every
/// language gets its own random stream derived from the seed, the stage and
/// the language name.
pub fn stratified_sample(
    files: &[SourceFile],
    spec: &SampleSpec,
) -> Result<Vec<SourceFile>, CorpusError> {
    let quota = spec.per_language_count;
    if quota == 0 {
        return Err(CorpusError::ZeroQuota);
    }

    let mut by_language: BTreeMap<&str, BTreeMap<&str, Vec<&SourceFile>>> = BTreeMap::new();
    for f in files {
        by_language
            .entry(&f.language)
            .or_default()
            .entry(&f.project)
            .or_default()
            .push(f);
    }
    for (language, projects) in &by_language {
        let available: usize = projects.values().map(Vec::len).sum();
        if available < quota {
            return Err(CorpusError::QuotaExceeded {
                language: language.to_string(),
                available,
                requested: quota,
            });
        }
    }

    let mut out = Vec::with_capacity(quota * by_language.len());
    for (language, projects) in by_language {
        let mut rng = SplitMix64::derive(spec.seed, &format!("{}/{}", spec.stage, language));
        let mut pools: Vec<(&str, Vec<&SourceFile>)> = projects
            .into_iter()
            .map(|(project, mut files)| {
                files.sort_by(|a, b| a.path.cmp(&b.path));
                rng.shuffle(&mut files);
                (project, files)
            })
            .collect();

        let mut taken = 0;
        while taken < quota {
            let mut order: Vec<usize> = (0..pools.len()).filter(|&i| !pools[i].1.is_empty()).collect();
            rng.shuffle(&mut order);
            for i in order {
                if taken == quota {
                    break;
                }
                let file = pools[i].1.pop().expect("non-empty pool");
                out.push(file.clone());
                taken += 1;
            }
        }
    }
    out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(out)
}

/// Keeps files with at least `3 * ctx_size` tokens.
pub fn size_filter(files: &[SourceFile], ctx_size: usize) -> Result<Vec<SourceFile>, CorpusError> {
    if ctx_size == 0 {
        return Err(CorpusError::ZeroContext);
    }
    let min = 3 * ctx_size;
    let mut out = Vec::new();
    for f in files {
        let n = f.token_count.ok_or_else(|| CorpusError::MissingTokenCount {
            project: f.project.clone(),
            path: f.path.clone(),
        })?;
        if n >= min {
            out.push(f.clone());
        }
    }
    Ok(out)
}
