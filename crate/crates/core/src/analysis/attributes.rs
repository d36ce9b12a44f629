//! Per-language attributes plotted against median perplexity.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use super::summary::LanguageSummary;
use super::AnalysisError;

/// CSV layout: `language,<attr>,<attr>...`; empty cells mean missing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AttributeTable {
    names: Vec<String>,
    rows: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterPoint {
    pub language: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scatter {
    pub attribute: String,
    pub points: Vec<ScatterPoint>,
    pub missing: Vec<String>,
}

impl AttributeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> Result<Self, AnalysisError> {
        let f = std::fs::File::open(path).map_err(|e| AnalysisError::Io(path.to_path_buf(), e))?;
        Self::from_reader(f)
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, AnalysisError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.get(0) != Some("language") {
            return Err(AnalysisError::Schema("attribute table must start with a `language` column".into()));
        }
        let mut table = Self::new();
        for rec in rdr.records() {
            let rec = rec?;
            let lang = rec.get(0).unwrap_or_default().trim().to_string();
            for (name, cell) in headers.iter().zip(rec.iter()).skip(1) {
                let cell = cell.trim();
                if cell.is_empty() {
                    table.declare(name);
                    continue;
                }
                let v: f64 = cell.parse().map_err(|_| {
                    AnalysisError::Schema(format!("attribute `{name}` for `{lang}` is not a number: `{cell}`"))
                })?;
                table.set(&lang, name, v);
            }
        }
        for name in headers.iter().skip(1) {
            table.declare(name);
        }
        Ok(table)
    }

    pub fn declare(&mut self, name: &str) {
        if !self.names.iter().any(|n| n == name) {
            self.names.push(name.to_string());
        }
    }

    pub fn set(&mut self, language: &str, attribute: &str, value: f64) {
        self.declare(attribute);
        self.rows.entry(language.to_string()).or_default().insert(attribute.to_string(), value);
    }

    pub fn get(&self, language: &str, attribute: &str) -> Option<f64> {
        self.rows.get(language)?.get(attribute).copied()
    }

    pub fn attributes(&self) -> &[String] {
        &self.names
    }

    pub fn has_attribute(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }
}

/// Pairs each summarized language's attribute value with its median;
/// languages lacking the attribute are listed in `missing`.
pub fn attribute_scatter(
    summaries: &[LanguageSummary],
    table: &AttributeTable,
    attribute: &str,
) -> Result<Scatter, AnalysisError> {
    if !table.has_attribute(attribute) {
        return Err(AnalysisError::UnknownAttribute(attribute.to_string()));
    }
    let mut scatter = Scatter { attribute: attribute.to_string(), points: Vec::new(), missing: Vec::new() };
    for s in summaries {
        match table.get(&s.language, attribute) {
            Some(x) => scatter.points.push(ScatterPoint { language: s.language.clone(), x, y: s.median }),
            None => scatter.missing.push(s.language.clone()),
        }
    }
    Ok(scatter)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(lang: &str, median: f64) -> LanguageSummary {
        LanguageSummary {
            language: lang.into(),
            n_files: 1,
            median,
            q1: None,
            q3: None,
            whisker_low: None,
            whisker_high: None,
            n_outliers_removed: 0,
        }
    }

    #[test]
    fn bundled_release_years_cover_all_languages() {
        let table = AttributeTable::from_reader(&include_bytes!("../../data/attributes.csv")[..]).unwrap();
        let sums: Vec<_> = crate::corpus::ExtensionMap::builtin()
            .languages()
            .into_iter()
            .map(|l| summary(l, 2.0))
            .collect();
        let sc = attribute_scatter(&sums, &table, "release_year").unwrap();
        assert_eq!(sc.points.len(), 14);
        assert!(sc.missing.is_empty());
    }

    #[test]
    fn missing_and_unknown() {
        let table = AttributeTable::from_reader("language,year,share\nC,1972,\nGo,,0.5\n".as_bytes()).unwrap();
        let sums = [summary("C", 3.0), summary("Go", 4.0)];
        let sc = attribute_scatter(&sums, &table, "year").unwrap();
        assert_eq!(sc.points, [ScatterPoint { language: "C".into(), x: 1972.0, y: 3.0 }]);
        assert_eq!(sc.missing, ["Go"]);
        let sc = attribute_scatter(&[summary("R", 1.0)], &table, "share").unwrap();
        assert!(sc.points.is_empty());
        assert_eq!(sc.missing, ["R"]);
        assert!(matches!(attribute_scatter(&sums, &table, "stars"), Err(AnalysisError::UnknownAttribute(_))));
    }
}
