use std::path::PathBuf;

use rayon::prelude::*;
use walkdir::WalkDir;

use super::{CorpusError, ExtensionMap, ProjectRecord, SourceFile};

#[derive(Debug, Default)]
pub struct Classified {
    /// Sorted by (language, project, path).
    pub files: Vec<SourceFile>,
    /// Files or directories that could not be read and were skipped.
    pub unreadable: usize,
    /// Files whose extension is not in the map.
    pub unmapped: usize,
}

struct Candidate<'a> {
    project: &'a str,
    rel: String,
    language: &'a str,
    abs: PathBuf,
}

/// Walks every project root and keeps files whose extension maps to a
/// language, hashing their contents. `.git` directories are not entered.
pub fn classify_files(
    projects: &[ProjectRecord],
    ext_map: &ExtensionMap,
) -> Result<Classified, CorpusError> {
    let mut out = Classified::default();
    let mut candidates = Vec::new();

    for project in projects {
        std::fs::read_dir(&project.root_path).map_err(|source| CorpusError::UnreadableRoot {
            project: project.name.clone(),
            path: project.root_path.clone(),
            source,
        })?;
        let walker = WalkDir::new(&project.root_path)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| e.depth() == 0 || e.file_name() != ".git");
        for entry in walker {
            let entry = match entry {
                Ok(e) => e,
                Err(_) => {
                    out.unreadable += 1;
                    continue;
                }
            };
            if !entry.file_type().is_file() {
                continue;
            }
            let Some(name) = entry.file_name().to_str() else {
                out.unmapped += 1;
                continue;
            };
            let Some(language) = ext_map.classify(name) else {
                out.unmapped += 1;
                continue;
            };
            let rel = entry
                .path()
                .strip_prefix(&project.root_path)
                .unwrap_or(entry.path())
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            candidates.push(Candidate {
                project: &project.name,
                rel,
                language,
                abs: entry.into_path(),
            });
        }
    }

    let read: Vec<Option<SourceFile>> = candidates
        .par_iter()
        .map(|c| {
            std::fs::read(&c.abs)
                .ok()
                .map(|bytes| SourceFile::new(c.project, &c.rel, c.language, bytes))
        })
        .collect();
    for file in read {
        match file {
            Some(f) => out.files.push(f),
            None => out.unreadable += 1,
        }
    }
    out.files.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(out)
}
