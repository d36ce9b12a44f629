use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::CleanError;
use crate::corpus::ExtensionMap;

const BUILTIN: &str = include_str!("../../data/grammars.toml");

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDelimiter {
    pub open: String,
    pub close: String,
    /// Both delimiters must start a line, and the comment runs to the end
    /// of the closing line.
    #[serde(default)]
    pub line_start: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StringDelimiter {
    pub open: String,
    pub close: String,
    #[serde(default)]
    pub escape: Option<char>,
    #[serde(default)]
    pub multiline: bool,
}

/// Comment and string syntax for one language: enough to tell comments
/// from code without parsing.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommentGrammar {
    pub language: String,
    #[serde(default)]
    pub line_comments: Vec<String>,
    #[serde(default)]
    pub block_comments: Vec<BlockDelimiter>,
    #[serde(default)]
    pub strings: Vec<StringDelimiter>,
    #[serde(default)]
    pub doc_strings: Vec<String>,
    #[serde(default)]
    pub hashbang: bool,
    #[serde(default)]
    pub nested_blocks: bool,
    #[serde(default)]
    pub word_start_line_comments: bool,
}

impl CommentGrammar {
    pub fn validate(&self) -> Result<(), String> {
        let lang = &self.language;
        if lang.is_empty() {
            return Err("grammar without a language name".into());
        }
        let mut openers: Vec<&str> = Vec::new();
        for m in &self.line_comments {
            openers.push(m);
        }
        for b in &self.block_comments {
            if b.close.is_empty() {
                return Err(format!("{lang}: empty block close delimiter"));
            }
            if b.open == b.close {
                return Err(format!("{lang}: block delimiter `{}` opens and closes", b.open));
            }
            openers.push(&b.open);
        }
        for s in &self.strings {
            if s.escape.is_some_and(|c| !c.is_ascii()) {
                return Err(format!("{lang}: escape character must be ASCII"));
            }
            if s.close.is_empty() {
                return Err(format!("{lang}: empty string close delimiter"));
            }
            openers.push(&s.open);
        }
        if openers.iter().any(|o| o.is_empty()) {
            return Err(format!("{lang}: empty delimiter"));
        }
        if openers.iter().any(|o| !o.is_ascii()) {
            return Err(format!("{lang}: delimiters must be ASCII"));
        }
        let mut sorted = openers.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(format!("{lang}: delimiter `{}` declared twice", w[0]));
        }
        for d in &self.doc_strings {
            if !self.strings.iter().any(|s| &s.open == d) {
                return Err(format!("{lang}: doc string form `{d}` is not a string opener"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GrammarFile {
    version: u32,
    #[serde(default)]
    grammar: Vec<CommentGrammar>,
}

/// All grammars of a run, keyed by language.
#[derive(Debug, Clone, Default)]
pub struct GrammarSet {
    by_language: BTreeMap<String, CommentGrammar>,
}

impl GrammarSet {
    /// The 14 grammars shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_toml(BUILTIN).expect("bundled grammars are valid")
    }

    pub fn load(path: &Path) -> Result<Self, CleanError> {
        let text = std::fs::read_to_string(path).map_err(|source| CleanError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CleanError> {
        let file: GrammarFile =
            toml::from_str(text).map_err(|e| CleanError::Grammar(e.to_string()))?;
        if file.version != 1 {
            return Err(CleanError::Grammar(format!(
                "unsupported grammar file version {}",
                file.version
            )));
        }
        let mut set = Self::default();
        for g in file.grammar {
            g.validate().map_err(CleanError::Grammar)?;
            if set.by_language.contains_key(&g.language) {
                return Err(CleanError::Grammar(format!(
                    "two grammars for `{}`",
                    g.language
                )));
            }
            set.by_language.insert(g.language.clone(), g);
        }
        Ok(set)
    }

    pub fn get(&self, language: &str) -> Result<&CommentGrammar, CleanError> {
        self.by_language
            .get(language)
            .ok_or_else(|| CleanError::NoGrammar(language.to_string()))
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.by_language.keys().map(String::as_str)
    }

    /// Every language the extension map can produce has a grammar.
    pub fn check_covers(&self, ext_map: &ExtensionMap) -> Result<(), CleanError> {
        match ext_map.languages().into_iter().find(|l| !self.by_language.contains_key(*l)) {
            Some(missing) => Err(CleanError::NoGrammar(missing.to_string())),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_covers_builtin_extension_map() {
        let set = GrammarSet::builtin();
        assert_eq!(set.languages().count(), 14);
        set.check_covers(&ExtensionMap::builtin()).unwrap();
    }

    #[test]
    fn python_grammar_shape() {
        let set = GrammarSet::builtin();
        let py = set.get("Python").unwrap();
        assert_eq!(py.line_comments, ["#"]);
        assert!(py.block_comments.is_empty());
        assert!(py.hashbang);
        assert_eq!(py.doc_strings, ["\"\"\"", "'''"]);
        assert_eq!(py.strings[0].escape, Some('\\'));
    }

    #[test]
    fn duplicate_delimiter_rejected() {
        let toml = r##"
            version = 1
            [[grammar]]
            language = "X"
            line_comments = ["#"]
            strings = [{ open = "#", close = "#" }]
        "##;
        let err = GrammarSet::from_toml(toml).unwrap_err();
        assert!(err.to_string().contains("declared twice"), "{err}");
    }

    #[test]
    fn unknown_language_errors() {
        assert!(matches!(
            GrammarSet::builtin().get("Rust"),
            Err(CleanError::NoGrammar(_))
        ));
    }

    #[test]
    fn missing_coverage_detected() {
        let set = GrammarSet::from_toml("version = 1\n[[grammar]]\nlanguage = \"C\"\n").unwrap();
        let err = set.check_covers(&ExtensionMap::builtin()).unwrap_err();
        assert!(matches!(err, CleanError::NoGrammar(_)));
    }
}
