//! Validation of estimators against subjective scores.

pub mod manifest;
pub mod report;
pub mod stats;

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{Assessor, Estimator};
use crate::image::load_image;

pub use manifest::{load_manifest, Category, CountCheck, Database, DatasetManifest, ManifestRow};
pub use report::{build_report, category_report, BenchmarkRecord, CorrelationReport};
pub use stats::{average_ranks, pearson, significance, significance_with, spearman};

/// A manifest row that could not be scored.
#[derive(Debug)]
pub struct RowFailure {
    pub database: Database,
    pub line: usize,
    pub path: PathBuf,
    pub error: Error,
}

/// Scores for every row, sorted by pair id, plus failures of skipped rows.
#[derive(Debug, Default)]
pub struct BenchmarkRun {
    pub records: Vec<BenchmarkRecord>,
    pub skipped: Vec<RowFailure>,
}

fn pair_id(database: Database, row: &ManifestRow) -> String {
    format!("{database}:{}", row.distorted.display())
}

/// Score every manifest row in parallel. Rows sharing a reference image
/// reuse its features. Without `skip_missing` the first failure (in
/// manifest order) aborts the run.
pub fn run_benchmark(
    manifests: &[DatasetManifest],
    assessor: &Assessor,
    estimators: &[Estimator],
    skip_missing: bool,
) -> Result<BenchmarkRun> {
    let mut groups: BTreeMap<(Database, PathBuf), Vec<&ManifestRow>> = BTreeMap::new();
    for m in manifests {
        for row in &m.rows {
            groups
                .entry((m.database, row.reference.clone()))
                .or_default()
                .push(row);
        }
    }
    let groups: Vec<_> = groups.into_iter().collect();

    let results: Vec<std::result::Result<BenchmarkRecord, RowFailure>> = groups
        .par_iter()
        .flat_map_iter(|((db, ref_path), rows)| {
            let fail = |row: &ManifestRow, path: &PathBuf, error: Error| RowFailure {
                database: *db,
                line: row.line,
                path: path.clone(),
                error,
            };
            let reference = load_image(ref_path)
                .and_then(|img| assessor.preprocess(&img))
                .and_then(|img| Ok((assessor.features(&img, estimators)?, img.dims())));
            let out: Vec<_> = match reference {
                Err(e) => {
                    let message = format!("reference image unusable: {e}");
                    rows.iter()
                        .map(|row| {
                            let error = Error::BadRecord {
                                line: row.line,
                                message: message.clone(),
                            };
                            Err(fail(row, ref_path, error))
                        })
                        .collect()
                }
                Ok((ref_features, dims)) => rows
                    .par_iter()
                    .map(|row| {
                        let dist = load_image(&row.distorted)
                            .and_then(|img| assessor.preprocess(&img))
                            .map_err(|e| fail(row, &row.distorted, e))?;
                        if dist.dims() != dims {
                            let d = dist.dims();
                            return Err(fail(
                                row,
                                &row.distorted,
                                Error::DimensionMismatch(dims.0, dims.1, d.0, d.1),
                            ));
                        }
                        let score_all = || -> Result<BTreeMap<Estimator, f64>> {
                            let feats = assessor.features(&dist, estimators)?;
                            estimators
                                .iter()
                                .map(|&e| {
                                    Ok((e, assessor.compose(e, &ref_features, &feats)?.score))
                                })
                                .collect()
                        };
                        let scores = score_all().map_err(|e| fail(row, &row.distorted, e))?;
                        Ok(BenchmarkRecord {
                            pair_id: pair_id(*db, row),
                            database: *db,
                            categories: row.categories.clone(),
                            mos: row.mos,
                            scores,
                        })
                    })
                    .collect(),
            };
            out
        })
        .collect();

    let mut run = BenchmarkRun::default();
    for r in results {
        match r {
            Ok(rec) => run.records.push(rec),
            Err(f) => run.skipped.push(f),
        }
    }
    run.skipped.sort_by_key(|a| (a.database, a.line));
    if !skip_missing {
        if let Some(first) = run.skipped.first() {
            return Err(Error::BadRecord {
                line: first.line,
                message: format!(
                    "{} ({}): {}",
                    first.database,
                    first.path.display(),
                    first.error
                ),
            });
        }
    }
    run.records.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
    Ok(run)
}
