//! Per-category correlation reports for baseline/assisted estimator pairs.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::benchmark::manifest::{Category, Database};
use crate::benchmark::stats::{significance_with, spearman};
use crate::error::{Error, Result};
use crate::estimators::Estimator;

/// One scored distorted image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub pair_id: String,
    pub database: Database,
    pub categories: Vec<Category>,
    pub mos: f64,
    pub scores: BTreeMap<Estimator, f64>,
}

/// Comparison of an assisted estimator with its baseline on one group of
/// records. Fields are `None` where the statistic is undefined (too few
/// records, constant scores, zero baseline correlation).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairChange {
    pub baseline: Estimator,
    pub assisted: Estimator,
    pub pct_change: Option<f64>,
    pub significant: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub n: usize,
    pub srcc: BTreeMap<Estimator, Option<f64>>,
    pub changes: Vec<PairChange>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatabaseReport {
    pub categories: BTreeMap<Category, GroupReport>,
    pub overall: GroupReport,
}

/// Cross-database figure for one category and estimator pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategorySummary {
    pub category: Category,
    pub baseline: Estimator,
    pub assisted: Estimator,
    /// Image-count weighted mean of the per-database changes.
    pub pct_change: Option<f64>,
    /// One character per database in report order: `1`, `0`, `-` when the
    /// database has no such images, `?` when the test is undefined.
    pub significance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub critical_z: f64,
    pub pairs: Vec<(Estimator, Estimator)>,
    pub databases: BTreeMap<Database, DatabaseReport>,
    pub summary: Vec<CategorySummary>,
}

fn pct_change(baseline: Option<f64>, assisted: Option<f64>) -> Option<f64> {
    match (baseline, assisted) {
        (Some(b), Some(a)) if b != 0.0 => Some(100.0 * (a - b) / b.abs()),
        _ => None,
    }
}

fn group(
    records: &[&BenchmarkRecord],
    estimators: &[Estimator],
    pairs: &[(Estimator, Estimator)],
    critical_z: f64,
) -> GroupReport {
    let mos: Vec<f64> = records.iter().map(|r| r.mos).collect();
    let srcc: BTreeMap<Estimator, Option<f64>> = estimators
        .iter()
        .map(|&e| {
            let scores: Vec<f64> = records.iter().map(|r| r.scores[&e]).collect();
            (e, spearman(&scores, &mos).ok())
        })
        .collect();
    let changes = pairs
        .iter()
        .map(|&(baseline, assisted)| {
            let (b, a) = (srcc[&baseline], srcc[&assisted]);
            let significant = match (b, a) {
                (Some(b), Some(a)) => significance_with(a, b, records.len(), critical_z).ok(),
                _ => None,
            };
            PairChange {
                baseline,
                assisted,
                pct_change: pct_change(b, a),
                significant,
            }
        })
        .collect();
    GroupReport {
        n: records.len(),
        srcc,
        changes,
    }
}

/// Build the report for several baseline/assisted pairs at once.
pub fn build_report(
    records: &[BenchmarkRecord],
    pairs: &[(Estimator, Estimator)],
    critical_z: f64,
) -> Result<CorrelationReport> {
    if records.is_empty() {
        return Err(Error::EmptyCategory("all databases".into()));
    }
    let mut estimators: Vec<Estimator> = pairs.iter().flat_map(|&(b, a)| [b, a]).collect();
    estimators.sort();
    estimators.dedup();
    for r in records {
        for e in &estimators {
            if !r.scores.contains_key(e) {
                return Err(Error::MissingScore(e.to_string(), r.pair_id.clone()));
            }
        }
    }

    let mut by_db: BTreeMap<Database, Vec<&BenchmarkRecord>> = BTreeMap::new();
    for r in records {
        by_db.entry(r.database).or_default().push(r);
    }
    let databases: BTreeMap<Database, DatabaseReport> = by_db
        .iter()
        .map(|(&db, rows)| {
            let categories = Category::ALL
                .iter()
                .filter_map(|&c| {
                    let members: Vec<&BenchmarkRecord> = rows
                        .iter()
                        .copied()
                        .filter(|r| r.categories.contains(&c))
                        .collect();
                    (!members.is_empty())
                        .then(|| (c, group(&members, &estimators, pairs, critical_z)))
                })
                .collect();
            let overall = group(rows, &estimators, pairs, critical_z);
            (
                db,
                DatabaseReport {
                    categories,
                    overall,
                },
            )
        })
        .collect();

    let mut summary = Vec::new();
    for &category in &Category::ALL {
        if !databases
            .values()
            .any(|d| d.categories.contains_key(&category))
        {
            continue;
        }
        for (i, &(baseline, assisted)) in pairs.iter().enumerate() {
            let mut weighted = 0.0;
            let mut weight = 0usize;
            let mut bits = String::new();
            for d in databases.values() {
                match d.categories.get(&category) {
                    None => bits.push('-'),
                    Some(g) => {
                        let change = &g.changes[i];
                        bits.push(match change.significant {
                            Some(true) => '1',
                            Some(false) => '0',
                            None => '?',
                        });
                        if let Some(p) = change.pct_change {
                            weighted += p * g.n as f64;
                            weight += g.n;
                        }
                    }
                }
            }
            summary.push(CategorySummary {
                category,
                baseline,
                assisted,
                pct_change: (weight > 0).then(|| weighted / weight as f64),
                significance: bits,
            });
        }
    }

    Ok(CorrelationReport {
        critical_z,
        pairs: pairs.to_vec(),
        databases,
        summary,
    })
}

/// Report for a single baseline/assisted pair.
pub fn category_report(
    records: &[BenchmarkRecord],
    baseline: Estimator,
    assisted: Estimator,
    critical_z: f64,
) -> Result<CorrelationReport> {
    build_report(records, &[(baseline, assisted)], critical_z)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl CorrelationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Flat table: one row per category (and `ALL` per database) and pair,
    /// with the per-database statistics in repeated column groups.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let dbs: Vec<Database> = self.databases.keys().copied().collect();
        let mut header = vec![
            "category".to_string(),
            "baseline".into(),
            "assisted".into(),
            "pct_change".into(),
            "significance".into(),
        ];
        for db in &dbs {
            for col in [
                "n",
                "srcc_baseline",
                "srcc_assisted",
                "pct_change",
                "significant",
            ] {
                header.push(format!("{db}_{col}"));
            }
        }
        w.write_record(&header).map_err(csv_err)?;

        let per_db = |row: &mut Vec<String>,
                      pick: &dyn Fn(&DatabaseReport) -> Option<&GroupReport>,
                      i: usize| {
            for db in &dbs {
                match pick(&self.databases[db]) {
                    None => row.extend(std::iter::repeat(String::new()).take(5)),
                    Some(g) => {
                        let c = &g.changes[i];
                        row.push(g.n.to_string());
                        row.push(opt(g.srcc[&c.baseline]));
                        row.push(opt(g.srcc[&c.assisted]));
                        row.push(opt(c.pct_change));
                        row.push(
                            c.significant
                                .map(|s| u8::from(s).to_string())
                                .unwrap_or_default(),
                        );
                    }
                }
            }
        };

        for s in &self.summary {
            let i = self
                .pairs
                .iter()
                .position(|&p| p == (s.baseline, s.assisted))
                .expect("summary pair is listed");
            let mut row = vec![
                s.category.to_string(),
                s.baseline.to_string(),
                s.assisted.to_string(),
                opt(s.pct_change),
                s.significance.clone(),
            ];
            per_db(&mut row, &|d| d.categories.get(&s.category), i);
            w.write_record(&row).map_err(csv_err)?;
        }
        for (i, &(baseline, assisted)) in self.pairs.iter().enumerate() {
            let mut row = vec![
                "ALL".to_string(),
                baseline.to_string(),
                assisted.to_string(),
                String::new(),
                String::new(),
            ];
            per_db(&mut row, &|d| Some(&d.overall), i);
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Human-readable table of the cross-database category changes.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let dbs: Vec<String> = self.databases.keys().map(|d| d.to_string()).collect();
        out += &format!("significance order: {}\n", dbs.join(", "));
        out += &format!("{:<14}", "category");
        for (b, a) in &self.pairs {
            out += &format!("  {:>24}", format!("{a} vs {b}"));
        }
        out.push('\n');
        for &category in &Category::ALL {
            let cells: Vec<&CategorySummary> = self
                .summary
                .iter()
                .filter(|s| s.category == category)
                .collect();
            if cells.is_empty() {
                continue;
            }
            out += &format!("{:<14}", category.name());
            for c in cells {
                let pct = c
                    .pct_change
                    .map_or("n/a".to_string(), |p| format!("{p:+.2}"));
                out += &format!("  {:>24}", format!("{pct} ({})", c.significance));
            }
            out.push('\n');
        }
        for (db, report) in &self.databases {
            out += &format!("{:<14}", format!("{db} (all)"));
            for c in &report.overall.changes {
                let pct = c
                    .pct_change
                    .map_or("n/a".to_string(), |p| format!("{p:+.2}"));
                let bit = match c.significant {
                    Some(true) => "1",
                    Some(false) => "0",
                    None => "?",
                };
                out += &format!("  {:>24}", format!("{pct} ({bit})"));
            }
            out.push('\n');
        }
        out
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(
        id: usize,
        db: Database,
        cat: Category,
        mos: f64,
        base: f64,
        assisted: f64,
    ) -> BenchmarkRecord {
        BenchmarkRecord {
            pair_id: format!("{db}-{id:03}"),
            database: db,
            categories: vec![cat],
            mos,
            scores: [(Estimator::Fsim, base), (Estimator::BlessFsim, assisted)].into(),
        }
    }

    #[test]
    fn identical_scores_give_zero_change() {
        let recs: Vec<_> = (0..10)
            .map(|i| {
                let s = ((i * 7) % 10) as f64;
                record(i, Database::Custom, Category::Blur, i as f64, s, s)
            })
            .collect();
        let rep = category_report(&recs, Estimator::Fsim, Estimator::BlessFsim, 1.96).unwrap();
        let s = &rep.summary[0];
        assert_eq!(s.pct_change, Some(0.0));
        assert_eq!(s.significance, "0");
    }

    #[test]
    fn weighted_average_of_two_databases() {
        // Per database: baseline srcc 0.5, assisted srcc 0.51 or 0.52.
        let mk = |db: Database, assisted: [f64; 3]| -> Vec<BenchmarkRecord> {
            let base = [1.0, 3.0, 2.0];
            (0..3)
                .map(|i| record(i, db, Category::Noise, i as f64, base[i], assisted[i]))
                .collect()
        };
        let mut recs = mk(Database::Live, [1.0, 3.0, 2.0]);
        recs.extend(mk(Database::Tid13, [1.0, 2.0, 3.0]));
        let rep = category_report(&recs, Estimator::Fsim, Estimator::BlessFsim, 1.96).unwrap();
        let live =
            rep.databases[&Database::Live].categories[&Category::Noise].changes[0].pct_change;
        let tid =
            rep.databases[&Database::Tid13].categories[&Category::Noise].changes[0].pct_change;
        assert_eq!(live, Some(0.0));
        assert_eq!(tid, Some(100.0));
        assert_eq!(rep.summary[0].pct_change, Some(50.0));
        // n = 3 is too small for the test.
        assert_eq!(rep.summary[0].significance, "??");
    }

    #[test]
    fn empty_and_missing() {
        assert!(matches!(
            category_report(&[], Estimator::Fsim, Estimator::BlessFsim, 1.96),
            Err(Error::EmptyCategory(_))
        ));
        let mut r = record(0, Database::Live, Category::Blur, 1.0, 0.5, 0.5);
        r.scores.remove(&Estimator::BlessFsim);
        assert!(matches!(
            category_report(&[r], Estimator::Fsim, Estimator::BlessFsim, 1.96),
            Err(Error::MissingScore(..))
        ));
    }

    #[test]
    fn json_round_trip_and_csv() {
        let recs: Vec<_> = (0..12)
            .map(|i| {
                let f = i as f64;
                record(
                    i,
                    Database::Tid13,
                    Category::Color,
                    f,
                    (f * 1.3).sin(),
                    f.sqrt() + 0.1 * (f * 2.1).cos(),
                )
            })
            .collect();
        let rep = category_report(&recs, Estimator::Fsim, Estimator::BlessFsim, 1.96).unwrap();
        let back = CorrelationReport::from_json(&rep.to_json().unwrap()).unwrap();
        assert_eq!(back, rep);
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("category,baseline,assisted,pct_change,significance,TID13_n"));
        assert_eq!(text.lines().count(), 3);
    }
}
