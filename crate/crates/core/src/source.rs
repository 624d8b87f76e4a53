//! Messenger sources and propagation of one messenger to the screen.

use crate::detector::ScreenGeometry;
use crate::error::{invalid, Result};
use crate::geometry::{reduced_phase, BiprismSpec, Face, Lost, Point, Ray, Vec2};
use crate::rng::UniformStream;
use std::f64::consts::FRAC_PI_2;

/// Range of emission angles, measured from the +x axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aperture {
    pub min: f64,
    pub max: f64,
}

impl Aperture {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        let a = Self { min, max };
        a.validate()?;
        Ok(a)
    }

    pub fn symmetric(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min < self.max && self.min >= -FRAC_PI_2 && self.max <= FRAC_PI_2) {
            return Err(invalid(format!(
                "aperture [{}, {}] must be a non-empty sub-range of [-π/2, π/2]",
                self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn contains(&self, angle: f64) -> bool {
        self.min <= angle && angle <= self.max
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SourceKind {
    /// Two slits of width `slit_width` centred at ±`separation`/2 on x = 0.
    DoubleSlit { slit_width: f64, separation: f64 },
    /// Two Gaussian line sources with standard deviation `sigma` centred at
    /// ±`separation`/2 on x = 0.
    GaussianTwin { sigma: f64, separation: f64 },
    /// One Gaussian line source inside a biprism at x = `source_x`.
    BiprismPoint {
        sigma: f64,
        biprism: BiprismSpec,
        source_x: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub wavelength: f64,
    pub aperture: Aperture,
}

/// Which way a messenger went.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Route {
    Upper,
    Lower,
    /// Straight through the biprism apex.
    Apex,
}

impl From<Face> for Route {
    fn from(face: Face) -> Self {
        match face {
            Face::Upper => Route::Upper,
            Face::Lower => Route::Lower,
            Face::Apex => Route::Apex,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Emission {
    pub origin: Point,
    pub angle: f64,
    /// Slit or beam of origin; `None` for the single biprism source.
    pub route: Option<Route>,
}

fn pick_side(rng: &mut UniformStream) -> (f64, Route) {
    if rng.next_f64() < 0.5 {
        (1.0, Route::Upper)
    } else {
        (-1.0, Route::Lower)
    }
}

pub fn emit_double_slit(
    slit_width: f64,
    separation: f64,
    aperture: Aperture,
    rng: &mut UniformStream,
) -> Emission {
    let (side, route) = pick_side(rng);
    let y = side * separation / 2.0 + slit_width * (rng.next_f64() - 0.5);
    let angle = rng.uniform(aperture.min, aperture.max);
    Emission {
        origin: Point::new(0.0, y),
        angle,
        route: Some(route),
    }
}

pub fn emit_gaussian_twin(
    sigma: f64,
    separation: f64,
    aperture: Aperture,
    rng: &mut UniformStream,
) -> Emission {
    let (side, route) = pick_side(rng);
    let y = side * separation / 2.0 + sigma * rng.standard_normal();
    let angle = rng.uniform(aperture.min, aperture.max);
    Emission {
        origin: Point::new(0.0, y),
        angle,
        route: Some(route),
    }
}

pub fn emit_biprism(sigma: f64, source_x: f64, aperture: Aperture, rng: &mut UniformStream) -> Emission {
    let y = sigma * rng.standard_normal();
    let angle = rng.uniform(aperture.min, aperture.max);
    Emission {
        origin: Point::new(source_x, y),
        angle,
        route: None,
    }
}

impl SourceSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(invalid("wavelength must be positive"));
        }
        self.aperture.validate()?;
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{what} must be positive")))
            }
        };
        match self.kind {
            SourceKind::DoubleSlit {
                slit_width,
                separation,
            } => {
                positive(slit_width, "slit width")?;
                positive(separation, "slit separation")?;
                if slit_width > separation {
                    return Err(invalid("slits of width a at ±d/2 overlap unless a <= d"));
                }
            }
            SourceKind::GaussianTwin { sigma, separation } => {
                positive(sigma, "beam width")?;
                positive(separation, "beam separation")?;
            }
            SourceKind::BiprismPoint {
                sigma,
                biprism,
                source_x,
            } => {
                positive(sigma, "source width")?;
                biprism.validate()?;
                if !(source_x.is_finite() && source_x < biprism.apex_x) {
                    return Err(invalid("the source must sit behind the biprism apex"));
                }
            }
        }
        Ok(())
    }

    pub fn emit(&self, rng: &mut UniformStream) -> Emission {
        match self.kind {
            SourceKind::DoubleSlit {
                slit_width,
                separation,
            } => emit_double_slit(slit_width, separation, self.aperture, rng),
            SourceKind::GaussianTwin { sigma, separation } => {
                emit_gaussian_twin(sigma, separation, self.aperture, rng)
            }
            SourceKind::BiprismPoint {
                sigma, source_x, ..
            } => emit_biprism(sigma, source_x, self.aperture, rng),
        }
    }
}

/// What a messenger delivers to a detector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Message {
    e: Vec2,
    phase: f64,
    coordinate: f64,
    route: Route,
}

impl Message {
    /// `phase` must already lie in [0, 2π).
    pub fn from_phase(phase: f64, coordinate: f64, route: Route) -> Self {
        Self {
            e: Vec2::from_angle(phase),
            phase,
            coordinate,
            route,
        }
    }

    /// Unit vector (cos φ, sin φ).
    pub fn e(&self) -> Vec2 {
        self.e
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Screen coordinate of the arrival point: the angle from the origin on a
    /// semicircular screen, the y coordinate on a planar one.
    pub fn coordinate(&self) -> f64 {
        self.coordinate
    }

    pub fn route(&self) -> Route {
        self.route
    }
}

/// A source paired with the screen it illuminates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Experiment {
    source: SourceSpec,
    screen: ScreenGeometry,
}

impl Experiment {
    pub fn new(source: SourceSpec, screen: ScreenGeometry) -> Result<Self> {
        source.validate()?;
        screen.validate()?;
        match (source.kind, screen) {
            (SourceKind::BiprismPoint { biprism, .. }, ScreenGeometry::Plane { x }) => {
                if x <= biprism.apex_x {
                    return Err(invalid("the screen must lie beyond the biprism apex"));
                }
            }
            (SourceKind::BiprismPoint { .. }, ScreenGeometry::Semicircle { .. }) => {
                return Err(invalid("the biprism experiment needs a planar screen"));
            }
            (_, ScreenGeometry::Plane { x }) if x <= 0.0 => {
                return Err(invalid("the screen plane must lie at x > 0"));
            }
            _ => {}
        }
        if let (SourceKind::DoubleSlit { slit_width, separation }, ScreenGeometry::Semicircle { radius }) =
            (source.kind, screen)
        {
            if (separation + slit_width) / 2.0 >= radius {
                return Err(invalid("the slits must lie inside the semicircular screen"));
            }
        }
        Ok(Self { source, screen })
    }

    pub fn source(&self) -> &SourceSpec {
        &self.source
    }

    pub fn screen(&self) -> ScreenGeometry {
        self.screen
    }

    /// Emits one messenger and carries it to the screen.
    pub fn next_message(&self, rng: &mut UniformStream) -> std::result::Result<Message, Lost> {
        let emission = self.source.emit(rng);
        self.propagate(&emission)
    }

    /// Carries an emitted messenger to the screen.
    pub fn propagate(&self, emission: &Emission) -> std::result::Result<Message, Lost> {
        let wavelength = self.source.wavelength;
        if let SourceKind::BiprismPoint { biprism, .. } = self.source.kind {
            let ScreenGeometry::Plane { x } = self.screen else {
                return Err(Lost::Missed);
            };
            let trace = biprism.trace(emission.origin, emission.angle, x)?;
            let phase = reduced_phase(trace.path.total_optical_length(), wavelength);
            return Ok(Message::from_phase(phase, trace.arrival.y, trace.face.into()));
        }
        let route = emission.route.unwrap_or(Route::Apex);
        let ray = Ray::from_angle(emission.origin, emission.angle);
        let (length, coordinate) = straight_to_screen(&ray, self.screen).ok_or(Lost::Missed)?;
        Ok(Message::from_phase(
            reduced_phase(length, wavelength),
            coordinate,
            route,
        ))
    }
}

/// Free-space distance from the ray origin to the screen and the screen
/// coordinate of the hit.
fn straight_to_screen(ray: &Ray, screen: ScreenGeometry) -> Option<(f64, f64)> {
    let o = ray.origin();
    let u = ray.direction();
    match screen {
        ScreenGeometry::Semicircle { radius } => {
            let b = o.dot(u);
            let c = o.norm_sq() - radius * radius;
            let t = -b + (b * b - c).sqrt();
            let hit = ray.at(t);
            (t >= 0.0 && hit.x >= 0.0).then(|| (t, hit.y.atan2(hit.x)))
        }
        ScreenGeometry::Plane { x } => {
            if u.x <= 0.0 {
                return None;
            }
            let t = (x - o.x) / u.x;
            (t >= 0.0).then_some((t, o.y + t * u.y))
        }
    }
}
