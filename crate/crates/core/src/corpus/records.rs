use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::SourceFile;

/// One row of a sample CSV: `project,path,language,content_hash,token_count`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub project: String,
    pub path: String,
    pub language: String,
    pub content_hash: String,
    pub token_count: Option<usize>,
}

impl From<&SourceFile> for SampleRecord {
    fn from(f: &SourceFile) -> Self {
        Self {
            project: f.project.clone(),
            path: f.path.clone(),
            language: f.language.clone(),
            content_hash: f.content_hash.clone(),
            token_count: f.token_count,
        }
    }
}

/// Writes rows sorted by (language, project, path).
pub fn write_sample_csv<W: Write>(writer: W, files: &[SourceFile]) -> Result<(), csv::Error> {
    let mut rows: Vec<SampleRecord> = files.iter().map(SampleRecord::from).collect();
    rows.sort_by(|a, b| (&a.language, &a.project, &a.path).cmp(&(&b.language, &b.project, &b.path)));
    let mut wtr = csv::Writer::from_writer(writer);
    for row in &rows {
        wtr.serialize(row)?;
    }
    // An empty sample still carries the header.
    if rows.is_empty() {
        wtr.write_record(["project", "path", "language", "content_hash", "token_count"])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_sample_csv<R: Read>(reader: R) -> Result<Vec<SampleRecord>, csv::Error> {
    csv::Reader::from_reader(reader).deserialize().collect()
}
