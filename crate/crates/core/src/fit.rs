//! Least-squares scaling of theory to counts and fringe analysis.

use crate::error::{invalid, Error, Result};
use crate::profile::CountsProfile;
use crate::wave::TheoryProfile;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitReport {
    /// `c` minimising `Σ (N − c I)²`.
    pub scale: f64,
    /// `sqrt(Σ (N − c I)² / Σ N²)`.
    pub normalized_rmse: f64,
    pub fringe_period_sim: Option<f64>,
    pub fringe_period_theory: Option<f64>,
}

impl FitReport {
    /// Flat `key=value` lines; absent periods are written as `none`.
    pub fn to_text(&self) -> String {
        let period = |p: Option<f64>| p.map_or("none".to_string(), |v| format!("{v:.16e}"));
        let mut s = String::new();
        let _ = writeln!(s, "scale={:.16e}", self.scale);
        let _ = writeln!(s, "normalized_rmse={:.16e}", self.normalized_rmse);
        let _ = writeln!(s, "fringe_period_sim={}", period(self.fringe_period_sim));
        let _ = writeln!(s, "fringe_period_theory={}", period(self.fringe_period_theory));
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut fields = std::collections::HashMap::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {line:?}")))?;
            fields.insert(k.trim(), v.trim());
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::Parse(format!("missing key {k}")))
        };
        let real = |k: &str| -> Result<f64> {
            get(k)?
                .parse()
                .map_err(|_| Error::Parse(format!("bad value for {k}")))
        };
        let period = |k: &str| -> Result<Option<f64>> {
            match get(k)? {
                "none" => Ok(None),
                v => v.parse().map(Some).map_err(|_| Error::Parse(format!("bad value for {k}"))),
            }
        };
        Ok(Self {
            scale: real("scale")?,
            normalized_rmse: real("normalized_rmse")?,
            fringe_period_sim: period("fringe_period_sim")?,
            fringe_period_theory: period("fringe_period_theory")?,
        })
    }
}

/// Least-squares scale and normalized RMSE of `counts` against `theory`.
pub fn fit_scale(counts: &[f64], theory: &[f64]) -> Result<(f64, f64)> {
    if counts.len() != theory.len() {
        return Err(invalid("counts and theory differ in length"));
    }
    let sii: f64 = theory.iter().map(|i| i * i).sum();
    let snn: f64 = counts.iter().map(|n| n * n).sum();
    if sii == 0.0 {
        return Err(Error::DegenerateFit("theory is identically zero".into()));
    }
    if snn == 0.0 {
        return Err(Error::DegenerateFit("no detector fired".into()));
    }
    let sni: f64 = counts.iter().zip(theory).map(|(n, i)| n * i).sum();
    let c = sni / sii;
    let sse: f64 = counts.iter().zip(theory).map(|(n, i)| (n - c * i).powi(2)).sum();
    Ok((c, (sse / snn).sqrt()))
}

/// Options steering the fringe analysis.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FringeOptions {
    /// Expected fringe period in screen coordinates. When absent it is taken
    /// from the spacing of the theory curve's central minima.
    pub period_hint: Option<f64>,
}

/// Fits the fired counts of `profile` to `theory` and estimates fringe
/// periods on both curves.
pub fn fit_and_compare(profile: &CountsProfile, theory: &TheoryProfile) -> Result<FitReport> {
    fit_and_compare_with(profile, theory, &FringeOptions::default())
}

pub fn fit_and_compare_with(
    profile: &CountsProfile,
    theory: &TheoryProfile,
    options: &FringeOptions,
) -> Result<FitReport> {
    let xs = profile.coordinates();
    if xs != theory.coordinates {
        return Err(invalid("profile and theory are sampled at different coordinates"));
    }
    let counts: Vec<f64> = profile.rows.iter().map(|r| r.fired as f64).collect();
    let (scale, normalized_rmse) = fit_scale(&counts, &theory.intensities)?;

    let step = if xs.len() > 1 { xs[1] - xs[0] } else { 0.0 };
    let period_theory = match options.period_hint {
        Some(p) => central_minima_period(&xs, &theory.intensities, quarter_samples(p, step)),
        None => central_minima_period(&xs, &theory.intensities, 1),
    };
    let guide = options.period_hint.or(period_theory);
    let period_sim = guide.and_then(|p| {
        let q = quarter_samples(p, step);
        let smooth = moving_average(&counts, odd(q));
        central_minima_period(&xs, &smooth, q)
    });
    Ok(FitReport {
        scale,
        normalized_rmse,
        fringe_period_sim: period_sim,
        fringe_period_theory: period_theory,
    })
}

/// Number of samples in a quarter of `period`, at least one.
pub fn quarter_samples(period: f64, step: f64) -> usize {
    if !(step > 0.0) {
        return 1;
    }
    ((period / (4.0 * step)).round() as usize).max(1)
}

fn odd(n: usize) -> usize {
    if n.is_multiple_of(2) {
        n + 1
    } else {
        n
    }
}

/// Centred moving average of odd `width`, shrinking the window at the edges.
pub fn moving_average(ys: &[f64], width: usize) -> Vec<f64> {
    let h = width / 2;
    let mut prefix = Vec::with_capacity(ys.len() + 1);
    prefix.push(0.0);
    for y in ys {
        prefix.push(prefix.last().unwrap() + y);
    }
    (0..ys.len())
        .map(|i| {
            let lo = i.saturating_sub(h);
            let hi = (i + h + 1).min(ys.len());
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Minimum,
    Maximum,
}

/// Positions of extrema that dominate every sample within `half_window` on
/// either side and lie at least `half_window` samples from both ends. Each is
/// refined by a parabola through its neighbours.
pub fn find_extrema(xs: &[f64], ys: &[f64], kind: Extremum, half_window: usize) -> Vec<(f64, f64)> {
    let n = ys.len();
    let h = half_window.max(1);
    if n < 2 * h + 1 {
        return Vec::new();
    }
    let beats = |a: f64, b: f64| match kind {
        Extremum::Minimum => a < b,
        Extremum::Maximum => a > b,
    };
    let ties = |a: f64, b: f64| match kind {
        Extremum::Minimum => a <= b,
        Extremum::Maximum => a >= b,
    };
    let mut out = Vec::new();
    for i in h..n - h {
        let y = ys[i];
        // Ties resolve to the leftmost sample of a flat extremum.
        let left = (i - h..i).all(|j| beats(y, ys[j]));
        let right = (i + 1..=i + h).all(|j| ties(y, ys[j]));
        if left && right {
            out.push(refine(xs, ys, i));
        }
    }
    out
}

fn refine(xs: &[f64], ys: &[f64], i: usize) -> (f64, f64) {
    let (y0, y1, y2) = (ys[i - 1], ys[i], ys[i + 1]);
    let denom = y0 - 2.0 * y1 + y2;
    if denom == 0.0 {
        return (xs[i], y1);
    }
    let t = (0.5 * (y0 - y2) / denom).clamp(-0.5, 0.5);
    let dx = 0.5 * (xs[i + 1] - xs[i - 1]);
    (xs[i] + t * dx, y1 - 0.25 * (y0 - y2) * t)
}

/// Spacing of the two minima nearest the centre of the coordinate range.
pub fn central_minima_period(xs: &[f64], ys: &[f64], half_window: usize) -> Option<f64> {
    let (first, last) = (*xs.first()?, *xs.last()?);
    let centre = 0.5 * (first + last);
    let mut minima: Vec<f64> = find_extrema(xs, ys, Extremum::Minimum, half_window)
        .into_iter()
        .map(|m| m.0)
        .collect();
    if minima.len() < 2 {
        return None;
    }
    minima.sort_by(|a, b| (a - centre).abs().total_cmp(&(b - centre).abs()));
    Some((minima[0] - minima[1]).abs())
}

/// Maxima reaching at least `min_fraction` of the curve's global maximum and
/// lying within `half_range` of the centre of the coordinate range.
pub fn prominent_maxima(xs: &[f64], ys: &[f64], half_window: usize, min_fraction: f64, half_range: f64) -> Vec<f64> {
    let Some((&first, &last)) = xs.first().zip(xs.last()) else {
        return Vec::new();
    };
    let centre = 0.5 * (first + last);
    let top = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    find_extrema(xs, ys, Extremum::Maximum, half_window)
        .into_iter()
        .filter(|&(x, y)| y >= min_fraction * top && (x - centre).abs() <= half_range)
        .map(|(x, _)| x)
        .collect()
}
