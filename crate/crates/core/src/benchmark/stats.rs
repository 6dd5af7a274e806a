//! Rank correlation and correlation-difference testing.

use crate::error::{Error, Result};

/// Two-sided 95% critical value of the standard normal.
pub const DEFAULT_CRITICAL_Z: f64 = 1.96;

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i..j (0-based) hold equal values.
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 || x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput);
    }
    Ok(())
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation. Without ties this is
/// `1 - 6 sum d^2 / (N (N^2 - 1))`; with ties it is the Pearson
/// correlation of the average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let distinct = |r: &[f64]| {
        r.iter().all(|v| v.fract() == 0.0) && {
            let mut s = r.to_vec();
            s.sort_by(f64::total_cmp);
            s.windows(2).all(|w| w[0] != w[1])
        }
    };
    if distinct(&rx) && distinct(&ry) {
        let n = x.len() as f64;
        let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b) * (a - b)).sum();
        return Ok(1.0 - 6.0 * d2 / (n * (n * n - 1.0)));
    }
    pearson(&rx, &ry)
}

/// Fisher-z test for the difference of two correlations measured on the
/// same `n` samples: `|atanh(a) - atanh(b)| / sqrt(2 / (n - 3)) > z`.
pub fn significance_with(srcc_a: f64, srcc_b: f64, n: usize, critical_z: f64) -> Result<bool> {
    if n < 4 {
        return Err(Error::SampleTooSmall(n));
    }
    for r in [srcc_a, srcc_b] {
        if !(r.abs() < 1.0) {
            return Err(Error::PerfectCorrelation(r));
        }
    }
    let stat = (srcc_a.atanh() - srcc_b.atanh()).abs() / (2.0 / (n as f64 - 3.0)).sqrt();
    Ok(stat > critical_z)
}

/// [`significance_with`] at the 95% two-sided level.
pub fn significance(srcc_a: f64, srcc_b: f64, n: usize) -> Result<bool> {
    significance_with(srcc_a, srcc_b, n, DEFAULT_CRITICAL_Z)
}
