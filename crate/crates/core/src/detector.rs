//! Adaptive threshold detectors and the screen they tile.
//!
//! Each detector keeps an internal vector `p` with `‖p‖ ≤ 1`. A received
//! message `e` updates it as `p ← γ p + (1 − γ) e`; the detector then draws a
//! fresh threshold `r ∈ [0, 1)` from its own stream and clicks iff
//! `‖p‖² > r`.

use crate::error::{invalid, Error, Result};
use crate::geometry::Vec2;
use crate::profile::{CountsProfile, ProfileRow};
use crate::rng::{detector_stream_id, rng_stream, UniformStream};
use crate::source::Message;
use std::f64::consts::FRAC_PI_2;

/// Half-open interval `[lo, hi)` of the screen coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn contains(&self, c: f64) -> bool {
        self.lo <= c && c < self.hi
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScreenGeometry {
    /// Arc of the circle of this radius about the origin; the coordinate is
    /// the polar angle of the arrival point.
    Semicircle { radius: f64 },
    /// The plane x = `x`; the coordinate is the arrival y.
    Plane { x: f64 },
}

impl ScreenGeometry {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScreenGeometry::Semicircle { radius } if !(radius > 0.0 && radius.is_finite()) => {
                Err(invalid("screen radius must be positive"))
            }
            ScreenGeometry::Plane { x } if !x.is_finite() => Err(invalid("screen plane must be finite")),
            _ => Ok(()),
        }
    }
}

/// The detecting part of a screen, `[lo, hi)` in screen coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Screen {
    pub geometry: ScreenGeometry,
    pub lo: f64,
    pub hi: f64,
}

impl Screen {
    pub fn new(geometry: ScreenGeometry, lo: f64, hi: f64) -> Result<Self> {
        let s = Self { geometry, lo, hi };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if !(self.lo < self.hi && self.lo.is_finite() && self.hi.is_finite()) {
            return Err(invalid(format!(
                "screen extent [{}, {}) must be a finite non-empty interval",
                self.lo, self.hi
            )));
        }
        if let ScreenGeometry::Semicircle { .. } = self.geometry {
            if self.lo < -FRAC_PI_2 || self.hi > FRAC_PI_2 {
                return Err(invalid("a semicircular screen spans at most [-π/2, π/2]"));
            }
        }
        Ok(())
    }

    /// Left edge of window `j`; `edge(count) == hi` exactly.
    pub fn edge(&self, count: usize, j: usize) -> f64 {
        if j >= count {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * (j as f64 / count as f64)
    }

    /// `count` equal windows that tile `[lo, hi)` without gaps.
    pub fn windows(&self, count: usize) -> Vec<Window> {
        (0..count)
            .map(|j| Window {
                lo: self.edge(count, j),
                hi: self.edge(count, j + 1),
            })
            .collect()
    }

    /// Index of the window containing `c`, consistent with [`Screen::windows`].
    pub fn locate(&self, count: usize, c: f64) -> Option<usize> {
        if !(self.lo <= c && c < self.hi) {
            return None;
        }
        let scaled = (c - self.lo) / (self.hi - self.lo) * count as f64;
        let mut j = (scaled as usize).min(count - 1);
        while j > 0 && c < self.edge(count, j) {
            j -= 1;
        }
        while j + 1 < count && c >= self.edge(count, j + 1) {
            j += 1;
        }
        Some(j)
    }
}

/// State of one detector.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorState {
    p: Vec2,
    gamma: f64,
    window: Window,
    received: u64,
    fired: u64,
}

pub fn validate_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("memory parameter {gamma} must lie in (0, 1)")))
    }
}

impl DetectorState {
    pub fn new(gamma: f64, window: Window) -> Result<Self> {
        validate_gamma(gamma)?;
        Ok(Self {
            p: Vec2::default(),
            gamma,
            window,
            received: 0,
            fired: 0,
        })
    }

    /// Starts from internal vector `p0` instead of the origin.
    pub fn with_memory(mut self, p0: Vec2) -> Result<Self> {
        if !(p0.norm() <= 1.0 + crate::geometry::UNIT_TOLERANCE) {
            return Err(invalid("initial internal vector must have norm <= 1"));
        }
        self.p = p0;
        Ok(self)
    }

    /// Folds in message vector `e`, which must be a unit vector.
    #[inline]
    pub fn update(&mut self, e: Vec2) -> Result<()> {
        let norm = e.norm();
        if !((norm - 1.0).abs() <= crate::geometry::UNIT_TOLERANCE) {
            return Err(Error::InvalidMessage { norm });
        }
        self.p = self.p * self.gamma + e * (1.0 - self.gamma);
        self.received += 1;
        Ok(())
    }

    /// Compares `‖p‖²` to the threshold `r ∈ [0, 1)` and counts a click.
    #[inline]
    pub fn fire(&mut self, r: f64) -> Result<bool> {
        if !(0.0..1.0).contains(&r) {
            return Err(invalid(format!("threshold {r} must lie in [0, 1)")));
        }
        let click = self.p.norm_sq() > r;
        if click {
            self.fired += 1;
        }
        Ok(click)
    }

    pub fn p(&self) -> Vec2 {
        self.p
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn received(&self) -> u64 {
        self.received
    }

    pub fn fired(&self) -> u64 {
        self.fired
    }
}

/// What became of one delivered message.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reception {
    OffScreen,
    Received { detector: usize, fired: bool },
}

/// Detectors tiling a screen, each with its own threshold stream.
#[derive(Clone, Debug)]
pub struct DetectorArray {
    screen: Screen,
    detectors: Vec<DetectorState>,
    thresholds: Vec<UniformStream>,
    off_screen: u64,
}

impl DetectorArray {
    pub fn new(screen: Screen, count: usize, gamma: f64, seed: u64, replica: u32) -> Result<Self> {
        screen.validate()?;
        if count < 2 {
            return Err(invalid("at least two detectors are required"));
        }
        let detectors = screen
            .windows(count)
            .into_iter()
            .map(|w| DetectorState::new(gamma, w))
            .collect::<Result<Vec<_>>>()?;
        let thresholds = (0..count)
            .map(|j| rng_stream(seed, detector_stream_id(replica, j)))
            .collect();
        Ok(Self {
            screen,
            detectors,
            thresholds,
            off_screen: 0,
        })
    }

    pub fn screen(&self) -> &Screen {
        &self.screen
    }

    pub fn detectors(&self) -> &[DetectorState] {
        &self.detectors
    }

    pub fn off_screen(&self) -> u64 {
        self.off_screen
    }

    /// Counts a messenger that never reached the screen plane.
    pub fn tally_off_screen(&mut self) {
        self.off_screen += 1;
    }

    /// Routes a message to the detector whose window holds its coordinate.
    pub fn receive(&mut self, message: &Message) -> Result<Reception> {
        let Some(j) = self.screen.locate(self.detectors.len(), message.coordinate()) else {
            self.off_screen += 1;
            return Ok(Reception::OffScreen);
        };
        let detector = &mut self.detectors[j];
        detector.update(message.e())?;
        let r = self.thresholds[j].next_f64();
        let fired = detector.fire(r)?;
        Ok(Reception::Received { detector: j, fired })
    }

    /// Per-detector counts. Messengers absorbed before the screen are not
    /// known here, so `absorbed` is zero and `total_events` counts only the
    /// messages delivered to the array.
    pub fn counts_profile(&self) -> CountsProfile {
        let rows: Vec<ProfileRow> = self
            .detectors
            .iter()
            .enumerate()
            .map(|(index, d)| ProfileRow {
                index,
                coordinate: d.window.center(),
                received: d.received,
                fired: d.fired,
            })
            .collect();
        let received: u64 = rows.iter().map(|r| r.received).sum();
        CountsProfile {
            screen: self.screen,
            rows,
            off_screen: self.off_screen,
            absorbed: 0,
            total_events: received + self.off_screen,
            theory: None,
            theory_fitted: None,
        }
    }
}
