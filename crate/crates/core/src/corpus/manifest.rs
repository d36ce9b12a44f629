use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Read;
use std::path::{Path, PathBuf};

use super::CorpusError;

/// The copyleft GNU licenses kept for the reference corpus.
pub const GNU_LICENSES: [&str; 5] = ["gpl-2.0", "gpl-3.0", "agpl-3.0", "lgpl-2.1", "lgpl-3.0"];

const HEADER: [&str; 6] = ["name", "license", "stars", "forks", "primary_language", "root_path"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectRecord {
    pub name: String,
    pub license: String,
    pub stars: u64,
    pub forks: u64,
    pub primary_language: Option<String>,
    pub root_path: PathBuf,
}

/// A manifest row that could not be turned into a [`ProjectRecord`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowDiagnostic {
    /// 1-based line number in the manifest, counting the header.
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct ManifestLoad {
    pub projects: Vec<ProjectRecord>,
    pub rejected: Vec<RowDiagnostic>,
}

/// Reads a manifest CSV. Relative `root_path` values resolve against the
/// manifest's directory.
pub fn load_manifest(path: &Path) -> Result<ManifestLoad, CorpusError> {
    let file = std::fs::File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(file, base).map_err(|source| CorpusError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_manifest<R: Read>(reader: R, base: &Path) -> Result<ManifestLoad, csv::Error> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr.headers()?.clone();
    let mut load = ManifestLoad::default();
    let columns: Vec<Option<usize>> = HEADER
        .iter()
        .map(|h| headers.iter().position(|c| c == *h))
        .collect();
    if let Some(missing) = HEADER.iter().zip(&columns).find(|(_, c)| c.is_none()) {
        load.rejected.push(RowDiagnostic {
            line: 1,
            message: format!("header lacks column `{}`", missing.0),
        });
        return Ok(load);
    }
    let col = |i: usize| columns[i].unwrap();

    let mut seen = HashSet::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(col(i)).unwrap_or("");
        if row.len() != headers.len() {
            load.rejected.push(RowDiagnostic {
                line,
                message: format!("expected {} fields, found {}", headers.len(), row.len()),
            });
            continue;
        }
        let name = field(0);
        if name.is_empty() {
            load.rejected.push(RowDiagnostic {
                line,
                message: "empty project name".into(),
            });
            continue;
        }
        let (stars, forks) = match (field(2).parse::<u64>(), field(3).parse::<u64>()) {
            (Ok(s), Ok(f)) => (s, f),
            _ => {
                load.rejected.push(RowDiagnostic {
                    line,
                    message: format!("`{name}`: stars and forks must be non-negative integers"),
                });
                continue;
            }
        };
        if !seen.insert(name.to_string()) {
            load.rejected.push(RowDiagnostic {
                line,
                message: format!("duplicate project name `{name}`"),
            });
            continue;
        }
        let language = field(4);
        let root = PathBuf::from(field(5));
        load.projects.push(ProjectRecord {
            name: name.to_string(),
            license: field(1).to_ascii_lowercase(),
            stars,
            forks,
            primary_language: (!language.is_empty()).then(|| language.to_string()),
            root_path: if root.is_absolute() { root } else { base.join(root) },
        });
    }
    Ok(load)
}

pub fn license_filter(projects: &[ProjectRecord], allowed: &BTreeSet<String>) -> Vec<ProjectRecord> {
    let allowed: BTreeSet<String> = allowed.iter().map(|l| l.to_ascii_lowercase()).collect();
    projects
        .iter()
        .filter(|p| allowed.contains(&p.license.to_ascii_lowercase()))
        .cloned()
        .collect()
}

/// At least one star, one fork and a listed primary language.
pub fn quality_filter(projects: &[ProjectRecord]) -> Vec<ProjectRecord> {
    projects
        .iter()
        .filter(|p| p.stars >= 1 && p.forks >= 1 && p.primary_language.is_some())
        .cloned()
        .collect()
}

/// Keeps projects whose primary language accounts for at least
/// `min_frequency` of `population`.
pub fn frequency_filter(
    candidates: &[ProjectRecord],
    population: &[ProjectRecord],
    min_frequency: f64,
) -> Vec<ProjectRecord> {
    if population.is_empty() {
        return Vec::new();
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for p in population {
        if let Some(lang) = p.primary_language.as_deref() {
            *counts.entry(lang).or_default() += 1;
        }
    }
    let total = population.len() as f64;
    candidates
        .iter()
        .filter(|p| {
            p.primary_language.as_deref().is_some_and(|lang| {
                let n = counts.get(lang).copied().unwrap_or(0);
                n as f64 / total >= min_frequency
            })
        })
        .cloned()
        .collect()
}

/// License, quality and language-frequency filtering in one pass. The
/// frequency of a primary language is measured over the projects that
/// survive the license filter.
pub fn filter_projects(
    manifest: &[ProjectRecord],
    allowed_licenses: &BTreeSet<String>,
    min_lang_frequency: f64,
) -> Result<Vec<ProjectRecord>, CorpusError> {
    if manifest.is_empty() {
        return Err(CorpusError::EmptyManifest);
    }
    if !(0.0..=1.0).contains(&min_lang_frequency) {
        return Err(CorpusError::InvalidFrequency(min_lang_frequency));
    }
    let licensed = license_filter(manifest, allowed_licenses);
    let quality = quality_filter(&licensed);
    Ok(frequency_filter(&quality, &licensed, min_lang_frequency))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn project(name: &str, license: &str, stars: u64, forks: u64, lang: Option<&str>) -> ProjectRecord {
        ProjectRecord {
            name: name.into(),
            license: license.into(),
            stars,
            forks,
            primary_language: lang.map(String::from),
            root_path: PathBuf::from(name),
        }
    }

    fn gnu() -> BTreeSet<String> {
        GNU_LICENSES.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn non_gnu_license_is_dropped() {
        let manifest = vec![
            project("a", "gpl-3.0", 3, 1, Some("C")),
            project("b", "mit", 9, 9, Some("C")),
            project("c", "gpl-2.0", 1, 2, Some("C")),
        ];
        let kept = filter_projects(&manifest, &gnu(), 0.01).unwrap();
        let names: Vec<_> = kept.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["a", "c"]);
    }

    #[test]
    fn zero_stars_or_forks_or_language_dropped() {
        let manifest = vec![
            project("a", "gpl-3.0", 0, 5, Some("C")),
            project("b", "gpl-3.0", 5, 0, Some("C")),
            project("c", "gpl-3.0", 5, 5, None),
            project("d", "gpl-3.0", 1, 1, Some("C")),
        ];
        let kept = filter_projects(&manifest, &gnu(), 0.0).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].name, "d");
    }

    #[test]
    fn single_language_has_full_frequency() {
        let manifest: Vec<_> = (0..10)
            .map(|i| project(&format!("p{i}"), "gpl-3.0", 1, 1, Some("Go")))
            .collect();
        assert_eq!(filter_projects(&manifest, &gnu(), 0.01).unwrap().len(), 10);
        assert_eq!(filter_projects(&manifest, &gnu(), 1.0).unwrap().len(), 10);
    }

    #[test]
    fn rare_language_filtered_against_licensed_population() {
        // 1 of 200 licensed projects is R: frequency 0.005 < 0.01.
        let mut manifest: Vec<_> = (0..199)
            .map(|i| project(&format!("c{i}"), "gpl-3.0", 1, 1, Some("C")))
            .collect();
        manifest.push(project("r", "gpl-3.0", 1, 1, Some("R")));
        // Unlicensed projects do not count towards the denominator.
        manifest.extend((0..500).map(|i| project(&format!("m{i}"), "mit", 1, 1, Some("R"))));
        let kept = filter_projects(&manifest, &gnu(), 0.01).unwrap();
        assert_eq!(kept.len(), 199);
        assert!(kept.iter().all(|p| p.primary_language.as_deref() == Some("C")));
    }

    #[test]
    fn empty_result_is_not_an_error() {
        let manifest = vec![project("a", "mit", 1, 1, Some("C"))];
        assert!(filter_projects(&manifest, &gnu(), 0.01).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            filter_projects(&[], &gnu(), 0.01),
            Err(CorpusError::EmptyManifest)
        ));
        let manifest = vec![project("a", "gpl-3.0", 1, 1, Some("C"))];
        assert!(matches!(
            filter_projects(&manifest, &gnu(), 1.5),
            Err(CorpusError::InvalidFrequency(_))
        ));
    }

    #[test]
    fn malformed_rows_rejected_individually() {
        let csv = "name,license,stars,forks,primary_language,root_path\n\
                   good,GPL-3.0,4,2,Python,good\n\
                   bad,gpl-3.0,many,2,Python,bad\n\
                   short,gpl-3.0,1\n\
                   good,gpl-3.0,1,1,C,dup\n\
                   nolang,gpl-2.0,1,1,,/abs/nolang\n";
        let load = parse_manifest(csv.as_bytes(), Path::new("/corpus")).unwrap();
        let names: Vec<_> = load.projects.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["good", "nolang"]);
        assert_eq!(load.projects[0].license, "gpl-3.0");
        assert_eq!(load.projects[0].root_path, PathBuf::from("/corpus/good"));
        assert_eq!(load.projects[1].root_path, PathBuf::from("/abs/nolang"));
        assert_eq!(load.projects[1].primary_language, None);
        let lines: Vec<_> = load.rejected.iter().map(|d| d.line).collect();
        assert_eq!(lines, [3, 4, 5]);
    }

    #[test]
    fn missing_header_column_reported() {
        let load = parse_manifest("name,license\na,mit\n".as_bytes(), Path::new(".")).unwrap();
        assert!(load.projects.is_empty());
        assert!(load.rejected[0].message.contains("stars"));
    }
}
