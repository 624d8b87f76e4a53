//! Goodness-of-fit tools for count profiles.
//!
//! Detector counts are overdispersed: the memory of the internal vector makes
//! successive clicks of one detector correlated, so count variances exceed
//! the multinomial value by a roughly constant factor φ. Homogeneity tests
//! therefore divide the Pearson statistic by a dispersion estimated from
//! independent replicas.

use crate::error::{invalid, Result};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Kolmogorov–Smirnov distance between the sample and `cdf`. Sorts `xs`.
pub fn ks_statistic(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical distance at the 1% level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// Upper tail probability of the chi-square distribution.
pub fn chi2_sf(x: f64, dof: f64) -> Result<f64> {
    let dist = ChiSquared::new(dof).map_err(|e| invalid(format!("chi-square dof {dof}: {e}")))?;
    Ok(dist.sf(x))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contingency {
    pub statistic: f64,
    pub dof: usize,
}

/// Pearson statistic of an R×J table of counts. Columns whose total is below
/// `min_column_total` are dropped.
pub fn contingency(rows: &[&[u64]], min_column_total: u64) -> Result<Contingency> {
    let r = rows.len();
    if r < 2 {
        return Err(invalid("a contingency table needs at least two rows"));
    }
    let j = rows[0].len();
    if rows.iter().any(|row| row.len() != j) {
        return Err(invalid("contingency rows differ in length"));
    }
    let kept: Vec<usize> = (0..j)
        .filter(|&c| rows.iter().map(|row| row[c]).sum::<u64>() >= min_column_total.max(1))
        .collect();
    if kept.len() < 2 {
        return Err(invalid("fewer than two usable columns"));
    }
    let row_tot: Vec<f64> = rows
        .iter()
        .map(|row| kept.iter().map(|&c| row[c] as f64).sum())
        .collect();
    if row_tot.contains(&0.0) {
        return Err(invalid("a contingency row is empty"));
    }
    let grand: f64 = row_tot.iter().sum();
    let mut statistic = 0.0;
    for &c in &kept {
        let col: f64 = rows.iter().map(|row| row[c] as f64).sum();
        for (row, &rt) in rows.iter().zip(&row_tot) {
            let expected = rt * col / grand;
            statistic += (row[c] as f64 - expected).powi(2) / expected;
        }
    }
    Ok(Contingency {
        statistic,
        dof: (r - 1) * (kept.len() - 1),
    })
}

/// Pooled dispersion factor: the contingency statistic of independent
/// replicas divided by its degrees of freedom.
pub fn estimate_dispersion(replicas: &[Vec<u64>], min_column_total: u64) -> Result<f64> {
    let rows: Vec<&[u64]> = replicas.iter().map(Vec::as_slice).collect();
    let c = contingency(&rows, min_column_total)?;
    Ok(c.statistic / c.dof as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Homogeneity {
    pub statistic: f64,
    pub dof: usize,
    pub dispersion: f64,
    pub p_value: f64,
}

/// Tests whether two count profiles share one shape, scaling the Pearson
/// statistic by `dispersion`.
pub fn homogeneity(a: &[u64], b: &[u64], dispersion: f64, min_column_total: u64) -> Result<Homogeneity> {
    if !(dispersion > 0.0 && dispersion.is_finite()) {
        return Err(invalid("dispersion must be positive"));
    }
    let c = contingency(&[a, b], min_column_total)?;
    let scaled = c.statistic / dispersion;
    Ok(Homogeneity {
        statistic: scaled,
        dof: c.dof,
        dispersion,
        p_value: chi2_sf(scaled, c.dof as f64)?,
    })
}
