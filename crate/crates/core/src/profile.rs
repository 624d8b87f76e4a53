//! Per-detector counts, replica merging and the CSV form of a profile.

use crate::detector::Screen;
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

pub const CSV_HEADER: &str = "index,coordinate,received,fired,theory,theory_fitted";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileRow {
    pub index: usize,
    /// Centre of the detector window.
    pub coordinate: f64,
    pub received: u64,
    pub fired: u64,
}

/// Outcome of one run. `off_screen + absorbed + Σ received == total_events`.
#[derive(Clone, Debug, PartialEq)]
pub struct CountsProfile {
    pub screen: Screen,
    pub rows: Vec<ProfileRow>,
    pub off_screen: u64,
    pub absorbed: u64,
    pub total_events: u64,
    pub theory: Option<Vec<f64>>,
    pub theory_fitted: Option<Vec<f64>>,
}

impl CountsProfile {
    pub fn coordinates(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.coordinate).collect()
    }

    pub fn received(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.received).collect()
    }

    pub fn fired(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.fired).collect()
    }

    pub fn total_received(&self) -> u64 {
        self.rows.iter().map(|r| r.received).sum()
    }

    pub fn total_fired(&self) -> u64 {
        self.rows.iter().map(|r| r.fired).sum()
    }

    pub fn check_conservation(&self) -> Result<()> {
        let accounted = self.off_screen + self.absorbed + self.total_received();
        if accounted != self.total_events {
            return Err(Error::Numerical(format!(
                "{} events emitted but {accounted} accounted for",
                self.total_events
            )));
        }
        if let Some(r) = self.rows.iter().find(|r| r.fired > r.received) {
            return Err(Error::Numerical(format!(
                "detector {} fired {} times on {} messages",
                r.index, r.fired, r.received
            )));
        }
        Ok(())
    }

    /// Sums replica profiles taken on identical screens.
    pub fn merge(parts: &[CountsProfile]) -> Result<CountsProfile> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| Error::Merge("no profiles to merge".into()))?;
        let mut merged = first.clone();
        merged.theory = None;
        merged.theory_fitted = None;
        for p in rest {
            if p.screen != first.screen || p.rows.len() != first.rows.len() {
                return Err(Error::Merge("profiles were taken on different screens".into()));
            }
            for (m, r) in merged.rows.iter_mut().zip(&p.rows) {
                if m.coordinate != r.coordinate {
                    return Err(Error::Merge("detector windows differ".into()));
                }
                m.received += r.received;
                m.fired += r.fired;
            }
            merged.off_screen += p.off_screen;
            merged.absorbed += p.absorbed;
            merged.total_events += p.total_events;
        }
        Ok(merged)
    }

    /// CSV text with one row per detector; reals carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        let column = |col: &Option<Vec<f64>>, i: usize| {
            col.as_ref()
                .and_then(|v| v.get(i))
                .map(|x| format!("{x:.16e}"))
                .unwrap_or_default()
        };
        for (i, r) in self.rows.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{:.16e},{},{},{},{}",
                r.index,
                r.coordinate,
                r.received,
                r.fired,
                column(&self.theory, i),
                column(&self.theory_fitted, i),
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

/// One parsed CSV line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsvRecord {
    pub index: usize,
    pub coordinate: f64,
    pub received: u64,
    pub fired: u64,
    pub theory: Option<f64>,
    pub theory_fitted: Option<f64>,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == CSV_HEADER => {}
        _ => return Err(Error::Parse("missing or unexpected CSV header".into())),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", n + 2));
            let fields: Vec<&str> = line.trim_end().split(',').collect();
            if fields.len() != 6 {
                return Err(bad("field count"));
            }
            let opt = |s: &str, what: &str| -> Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|_| bad(what))
                }
            };
            Ok(CsvRecord {
                index: fields[0].parse().map_err(|_| bad("index"))?,
                coordinate: fields[1].parse().map_err(|_| bad("coordinate"))?,
                received: fields[2].parse().map_err(|_| bad("received"))?,
                fired: fields[3].parse().map_err(|_| bad("fired"))?,
                theory: opt(fields[4], "theory")?,
                theory_fitted: opt(fields[5], "theory_fitted")?,
            })
        })
        .collect()
}

/// Writes `contents` to a temporary file beside `path` and renames it over
/// `path`, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
