//! Manifest ingestion and distortion-code tables.
//!
//! A manifest is a CSV file with the header `ref,dist,mos,distortion`.
//! Image paths are resolved against the manifest's directory. When the
//! score column is named `dmos` instead of `mos`, values are negated on load
//! so that higher always means better quality.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Database {
    #[serde(rename = "LIVE")]
    Live,
    #[serde(rename = "MULTI")]
    Multi,
    #[serde(rename = "TID13")]
    Tid13,
    #[serde(rename = "CUSTOM")]
    Custom,
}

impl Database {
    pub const ALL: [Database; 4] = [
        Database::Live,
        Database::Multi,
        Database::Tid13,
        Database::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Database::Live => "LIVE",
            Database::Multi => "MULTI",
            Database::Tid13 => "TID13",
            Database::Custom => "CUSTOM",
        }
    }
}

impl fmt::Display for Database {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Database {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "LIVE" => Database::Live,
            "MULTI" | "LIVEMD" | "LIVE-MD" => Database::Multi,
            "TID13" | "TID2013" => Database::Tid13,
            "CUSTOM" => Database::Custom,
            _ => return Err(Error::InvalidParameter(format!("unknown database `{s}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Compression,
    Noise,
    Communication,
    Blur,
    Color,
    Global,
    Local,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Compression,
        Category::Noise,
        Category::Communication,
        Category::Blur,
        Category::Color,
        Category::Global,
        Category::Local,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Compression => "Compression",
            Category::Noise => "Noise",
            Category::Communication => "Communication",
            Category::Blur => "Blur",
            Category::Color => "Color",
            Category::Global => "Global",
            Category::Local => "Local",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Category::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown category `{s}`")))
    }
}

/// Parse a `+`-joined category list such as `noise+compression`.
pub fn parse_categories(s: &str) -> Result<Vec<Category>> {
    let mut out: Vec<Category> = s.split('+').map(str::parse).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

const TID2013_TABLE: &str = include_str!("../../data/categories/tid2013.csv");
const LIVE_TABLE: &str = include_str!("../../data/categories/live.csv");
const MULTI_TABLE: &str = include_str!("../../data/categories/multi.csv");

type CodeTable = BTreeMap<String, Vec<Category>>;

fn parse_table(text: &str) -> CodeTable {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| {
            let r = r.expect("bundled table is valid CSV");
            let cats = parse_categories(&r[2]).expect("bundled table uses known categories");
            (r[0].to_ascii_lowercase(), cats)
        })
        .collect()
}

fn table(database: Database) -> Option<&'static CodeTable> {
    static TID: OnceLock<CodeTable> = OnceLock::new();
    static LIVE: OnceLock<CodeTable> = OnceLock::new();
    static MULTI: OnceLock<CodeTable> = OnceLock::new();
    match database {
        Database::Tid13 => Some(TID.get_or_init(|| parse_table(TID2013_TABLE))),
        Database::Live => Some(LIVE.get_or_init(|| parse_table(LIVE_TABLE))),
        Database::Multi => Some(MULTI.get_or_init(|| parse_table(MULTI_TABLE))),
        Database::Custom => None,
    }
}

fn normalize_code(database: Database, code: &str) -> String {
    let code = code.trim().to_ascii_lowercase();
    if database == Database::Tid13 {
        if let Ok(n) = code.parse::<u32>() {
            return format!("{n:02}");
        }
    }
    code
}

/// Categories of a distortion code; `CUSTOM` manifests use category names
/// directly.
pub fn categories_for(database: Database, code: &str) -> Option<Vec<Category>> {
    match table(database) {
        Some(t) => t.get(&normalize_code(database, code)).cloned(),
        None => parse_categories(code).ok(),
    }
}

/// Per-category image counts of the complete public databases, and the
/// number of distinct distorted images.
pub fn reference_counts(database: Database) -> Option<(&'static [(Category, usize)], usize)> {
    use Category::*;
    match database {
        Database::Live => Some((
            &[
                (Compression, 460),
                (Noise, 174),
                (Communication, 174),
                (Blur, 174),
            ],
            982,
        )),
        Database::Multi => Some((&[(Compression, 225), (Noise, 225), (Blur, 450)], 450)),
        Database::Tid13 => Some((
            &[
                (Compression, 375),
                (Noise, 1375),
                (Communication, 250),
                (Blur, 250),
                (Color, 375),
                (Global, 250),
                (Local, 250),
            ],
            3000,
        )),
        Database::Custom => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestRow {
    /// 1-based line number in the source file.
    pub line: usize,
    pub reference: PathBuf,
    pub distorted: PathBuf,
    /// Opinion score, higher is better.
    pub mos: f64,
    pub code: String,
    pub categories: Vec<Category>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetManifest {
    pub database: Database,
    pub rows: Vec<ManifestRow>,
}

impl DatasetManifest {
    pub fn category_counts(&self) -> BTreeMap<Category, usize> {
        let mut counts = BTreeMap::new();
        for row in &self.rows {
            for &c in &row.categories {
                *counts.entry(c).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Compare category counts against the complete database.
    pub fn verify(&self) -> Option<CountCheck> {
        let (expected, total) = reference_counts(self.database)?;
        let actual = self.category_counts();
        let rows = Category::ALL
            .iter()
            .map(|&c| {
                let want = expected
                    .iter()
                    .find(|(e, _)| *e == c)
                    .map_or(0, |(_, n)| *n);
                (c, want, actual.get(&c).copied().unwrap_or(0))
            })
            .collect();
        Some(CountCheck {
            database: self.database,
            categories: rows,
            expected_total: total,
            actual_total: self.rows.len(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountCheck {
    pub database: Database,
    /// (category, expected, actual)
    pub categories: Vec<(Category, usize, usize)>,
    pub expected_total: usize,
    pub actual_total: usize,
}

impl CountCheck {
    pub fn ok(&self) -> bool {
        self.expected_total == self.actual_total
            && self.categories.iter().all(|(_, want, got)| want == got)
    }
}

/// Parse manifest CSV text. Relative paths are joined onto `base`.
pub fn parse_manifest(
    reader: impl Read,
    database: Database,
    base: &Path,
) -> Result<DatasetManifest> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = match csv.headers() {
        Ok(h) if !h.is_empty() && !(h.len() == 1 && h[0].is_empty()) => h.clone(),
        Ok(_) => return Err(Error::MissingColumn("ref".into())),
        Err(e) => {
            return Err(Error::BadRecord {
                line: 1,
                message: e.to_string(),
            })
        }
    };
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let col = |name: &str| find(name).ok_or_else(|| Error::MissingColumn(name.into()));
    let ref_col = col("ref")?;
    let dist_col = col("dist")?;
    let (mos_col, negate) = match (find("mos"), find("dmos")) {
        (Some(i), _) => (i, false),
        (None, Some(i)) => (i, true),
        (None, None) => return Err(Error::MissingColumn("mos".into())),
    };
    let code_col = col("distortion")?;

    let mut rows = Vec::new();
    for (i, record) in csv.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::BadRecord {
            line,
            message: e.to_string(),
        })?;
        let field = |c: usize| {
            record.get(c).ok_or_else(|| Error::BadRecord {
                line,
                message: format!("expected {} fields, got {}", headers.len(), record.len()),
            })
        };
        let mos: f64 = field(mos_col)?.parse().map_err(|_| Error::BadRecord {
            line,
            message: format!("score `{}` is not a number", &record[mos_col]),
        })?;
        if !mos.is_finite() {
            return Err(Error::BadRecord {
                line,
                message: "score is not finite".into(),
            });
        }
        let code = field(code_col)?.to_string();
        let categories =
            categories_for(database, &code).ok_or_else(|| Error::UnknownDistortionCode {
                database: database.to_string(),
                code: code.clone(),
                line,
            })?;
        rows.push(ManifestRow {
            line,
            reference: base.join(field(ref_col)?),
            distorted: base.join(field(dist_col)?),
            mos: if negate { -mos } else { mos },
            code,
            categories,
        });
    }
    Ok(DatasetManifest { database, rows })
}

pub fn load_manifest(path: &Path, database: Database) -> Result<DatasetManifest> {
    let file = std::fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path.to_path_buf())
        } else {
            Error::Io(e)
        }
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    parse_manifest(file, database, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, db: Database) -> Result<DatasetManifest> {
        parse_manifest(text.as_bytes(), db, Path::new("/data"))
    }

    #[test]
    fn tid_color_saturation_is_color() {
        let m = parse(
            "ref,dist,mos,distortion\nr.bmp,d.bmp,4.5,18\n",
            Database::Tid13,
        )
        .unwrap();
        assert_eq!(m.rows[0].categories, vec![Category::Color]);
        assert_eq!(m.rows[0].reference, PathBuf::from("/data/r.bmp"));
        assert_eq!(
            categories_for(Database::Tid13, "8"),
            Some(vec![Category::Blur])
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse("ref,dist,mos,distortion\nr,d,1,99\n", Database::Tid13),
            Err(Error::UnknownDistortionCode { line: 2, .. })
        ));
        assert!(matches!(
            parse("", Database::Tid13),
            Err(Error::MissingColumn(_))
        ));
        assert!(matches!(
            parse("ref,dist,distortion\nr,d,01\n", Database::Tid13),
            Err(Error::MissingColumn(_))
        ));
        assert!(matches!(
            parse("ref,dist,mos,distortion\nr,d,abc,01\n", Database::Tid13),
            Err(Error::BadRecord { line: 2, .. })
        ));
        assert!(matches!(
            load_manifest(Path::new("/nonexistent/m.csv"), Database::Live),
            Err(Error::FileNotFound(_))
        ));
    }

    #[test]
    fn dmos_is_negated() {
        let m = parse("ref,dist,dmos,distortion\nr,d,40,wn\n", Database::Live).unwrap();
        assert_eq!(m.rows[0].mos, -40.0);
        assert_eq!(m.rows[0].categories, vec![Category::Noise]);
    }

    #[test]
    fn custom_uses_category_names() {
        let m = parse(
            "ref,dist,mos,distortion\nr,d,1,Color\nr,d,2,blur+noise\n",
            Database::Custom,
        )
        .unwrap();
        assert_eq!(m.rows[0].categories, vec![Category::Color]);
        assert_eq!(m.rows[1].categories, vec![Category::Noise, Category::Blur]);
    }

    /// Synthesizing a full TID2013 layout (25 references x 24 codes x 5
    /// levels) reproduces the published category counts.
    #[test]
    fn full_tid_layout_matches_reference_counts() {
        let mut text = String::from("ref,dist,mos,distortion\n");
        for r in 1..=25 {
            for code in 1..=24 {
                for level in 1..=5 {
                    text += &format!("I{r:02}.BMP,i{r:02}_{code:02}_{level}.bmp,5.0,{code:02}\n");
                }
            }
        }
        let m = parse(&text, Database::Tid13).unwrap();
        let check = m.verify().unwrap();
        assert!(check.ok(), "{check:?}");
        let counts = m.category_counts();
        assert_eq!(counts[&Category::Color], 375);
        assert_eq!(counts[&Category::Noise], 1375);
    }

    #[test]
    fn bundled_tables_cover_reference_counts() {
        for db in [Database::Live, Database::Multi, Database::Tid13] {
            let (expected, _) = reference_counts(db).unwrap();
            let t = table(db).unwrap();
            for (c, _) in expected {
                assert!(t.values().any(|cats| cats.contains(c)), "{db} {c}");
            }
        }
    }
}
