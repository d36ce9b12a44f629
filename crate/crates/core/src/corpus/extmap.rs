use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use super::CorpusError;

const BUILTIN: &str = include_str!("../../data/extensions.csv");

/// File extension (lowercase, leading dot) to language name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExtensionMap {
    entries: BTreeMap<String, String>,
}

impl ExtensionMap {
    /// The 14-language map shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_reader(BUILTIN.as_bytes()).expect("bundled extension map is valid")
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let file = std::fs::File::open(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_reader(file)
    }

    /// Parses `language,extension` rows. An extension claimed by two
    /// languages is an error.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, CorpusError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut map = Self::default();
        for (i, row) in rdr.records().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| CorpusError::ExtensionMap {
                line,
                message: e.to_string(),
            })?;
            let (Some(language), Some(ext)) = (row.get(0), row.get(1)) else {
                return Err(CorpusError::ExtensionMap {
                    line,
                    message: "expected `language,extension`".into(),
                });
            };
            map.insert(language, ext)
                .map_err(|message| CorpusError::ExtensionMap { line, message })?;
        }
        Ok(map)
    }

    pub fn insert(&mut self, language: &str, extension: &str) -> Result<(), String> {
        if language.is_empty() {
            return Err("empty language name".into());
        }
        let ext = normalize(extension).ok_or_else(|| format!("invalid extension `{extension}`"))?;
        match self.entries.get(&ext) {
            Some(existing) if existing != language => Err(format!(
                "extension `{ext}` mapped to both `{existing}` and `{language}`"
            )),
            _ => {
                self.entries.insert(ext, language.to_string());
                Ok(())
            }
        }
    }

    /// Language of a file name by its last extension; `None` for unmapped
    /// or extensionless names such as `Makefile`.
    pub fn classify(&self, file_name: &str) -> Option<&str> {
        let dot = file_name.rfind('.')?;
        if dot == 0 {
            return None;
        }
        let ext = file_name[dot..].to_ascii_lowercase();
        self.entries.get(&ext).map(String::as_str)
    }

    pub fn languages(&self) -> BTreeSet<&str> {
        self.entries.values().map(String::as_str).collect()
    }

    pub fn extensions_of<'a>(&'a self, language: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.entries
            .iter()
            .filter(move |(_, l)| *l == language)
            .map(|(e, _)| e.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn normalize(ext: &str) -> Option<String> {
    let ext = ext.trim().to_ascii_lowercase();
    let ext = if ext.starts_with('.') { ext } else { format!(".{ext}") };
    (ext.len() > 1 && !ext[1..].contains(['.', '/', '\\'])).then_some(ext)
}
