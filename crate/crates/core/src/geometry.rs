//! Geometrical optics in the plane: rays, optical path lengths, phases and
//! refraction at the exit faces of a Fresnel biprism.
//!
//! Lengths are in meters and angles in radians throughout. The optical axis is
//! the x axis; the biprism apex sits at `(apex_x, 0)` and points toward +x.

use crate::error::{invalid, Result};
use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

/// Tolerance on the norm of anything declared to be a unit vector.
pub const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub type Point = Vec2;

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at `angle` from the +x axis.
    #[inline]
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: c, y: s }
    }

    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Self {
        self * (1.0 / self.norm())
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_unit(self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOLERANCE
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A half-line with unit direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    origin: Point,
    direction: Vec2,
}

impl Ray {
    /// Builds a ray, normalizing `direction`.
    pub fn new(origin: Point, direction: Vec2) -> Result<Self> {
        let norm = direction.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(invalid("ray direction must be a finite non-zero vector"));
        }
        Ok(Self {
            origin,
            direction: direction * (1.0 / norm),
        })
    }

    pub fn from_angle(origin: Point, angle: f64) -> Self {
        Self {
            origin,
            direction: Vec2::from_angle(angle),
        }
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn direction(&self) -> Vec2 {
        self.direction
    }

    pub fn angle(&self) -> f64 {
        self.direction.angle()
    }

    pub fn at(&self, t: f64) -> Point {
        self.origin + self.direction * t
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub length: f64,
    pub index: f64,
}

/// Piecewise path through homogeneous media.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OpticalPath {
    segments: Vec<Segment>,
    total: f64,
}

impl OpticalPath {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, length: f64, index: f64) -> Result<()> {
        if !(length >= 0.0 && length.is_finite()) {
            return Err(invalid(format!("segment length {length} must be finite and >= 0")));
        }
        if !(index >= 1.0 && index.is_finite()) {
            return Err(invalid(format!("refractive index {index} must be >= 1")));
        }
        self.segments.push(Segment { length, index });
        self.total += length * index;
        Ok(())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Sum of length × index over the segments.
    pub fn total_optical_length(&self) -> f64 {
        self.total
    }

    pub fn geometric_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }
}

/// Phase in `[0, 2π)` of a path of the given optical length.
///
/// The length is reduced modulo the wavelength with an exact floating-point
/// remainder before scaling, so only one rounding enters the result.
pub fn phase_of_path(optical_length: f64, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(invalid(format!("wavelength {wavelength} must be positive")));
    }
    if !(optical_length >= 0.0 && optical_length.is_finite()) {
        return Err(invalid(format!(
            "optical length {optical_length} must be finite and >= 0"
        )));
    }
    Ok(reduced_phase(optical_length, wavelength))
}

#[inline]
pub(crate) fn reduced_phase(optical_length: f64, wavelength: f64) -> f64 {
    let phase = TAU * ((optical_length % wavelength) / wavelength);
    if phase >= TAU {
        0.0
    } else {
        phase
    }
}

pub fn free_path_length(from: Point, to: Point) -> f64 {
    (to - from).norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TotalInternalReflection;

/// Why a messenger never reached the screen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lost {
    /// Totally internally reflected inside the glass.
    Absorbed,
    /// Left the optics on a course that never meets the screen.
    Missed,
}

impl From<TotalInternalReflection> for Lost {
    fn from(_: TotalInternalReflection) -> Self {
        Lost::Absorbed
    }
}

/// Refracts the unit `direction` at an interface whose unit `normal` points
/// into the second medium.
pub fn refract(
    direction: Vec2,
    normal: Vec2,
    n_in: f64,
    n_out: f64,
) -> std::result::Result<Vec2, TotalInternalReflection> {
    let eta = n_in / n_out;
    let cos_i = direction.dot(normal);
    let sin_t_sq = eta * eta * (1.0 - cos_i * cos_i).max(0.0);
    if sin_t_sq >= 1.0 {
        return Err(TotalInternalReflection);
    }
    let cos_t = (1.0 - sin_t_sq).sqrt();
    Ok((direction * eta + normal * (cos_t - eta * cos_i)).normalized())
}

/// Which exit face of the biprism a ray leaves through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Face {
    Upper,
    Lower,
    /// Exactly through the apex; the ray passes undeviated.
    Apex,
}

/// Two planar exit faces meeting at `(apex_x, 0)`, each tilted by half the
/// summit angle from the plane x = `apex_x`. The glass fills the wedge on the
/// -x side of both faces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiprismSpec {
    pub summit_angle: f64,
    pub refractive_index: f64,
    pub apex_x: f64,
}

/// Result of tracing one messenger through the biprism to a screen plane.
#[derive(Clone, Debug, PartialEq)]
pub struct BiprismTrace {
    pub path: OpticalPath,
    pub face: Face,
    pub exit: Point,
    pub arrival: Point,
    pub outgoing: Ray,
}

impl BiprismSpec {
    pub fn new(summit_angle: f64, refractive_index: f64, apex_x: f64) -> Result<Self> {
        let spec = Self {
            summit_angle,
            refractive_index,
            apex_x,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.summit_angle > 0.0 && self.summit_angle < std::f64::consts::FRAC_PI_2) {
            return Err(invalid("summit angle must lie in (0, π/2)"));
        }
        if !(self.refractive_index > 1.0 && self.refractive_index.is_finite()) {
            return Err(invalid("biprism refractive index must exceed 1"));
        }
        if !(self.apex_x > 0.0 && self.apex_x.is_finite()) {
            return Err(invalid("apex position must be positive"));
        }
        Ok(())
    }

    fn half_angle(&self) -> f64 {
        0.5 * self.summit_angle
    }

    pub fn apex(&self) -> Point {
        Point::new(self.apex_x, 0.0)
    }

    /// Outward unit normal of a face.
    pub fn face_normal(&self, face: Face) -> Vec2 {
        let (s, c) = self.half_angle().sin_cos();
        match face {
            Face::Upper => Vec2::new(c, s),
            Face::Lower => Vec2::new(c, -s),
            Face::Apex => Vec2::new(1.0, 0.0),
        }
    }

    /// True when `p` lies inside the glass.
    pub fn contains(&self, p: Point) -> bool {
        let a = self.apex();
        self.face_normal(Face::Upper).dot(p - a) < 0.0
            && self.face_normal(Face::Lower).dot(p - a) < 0.0
    }

    /// Distance along the ray to the exit face and which face it is.
    fn exit_crossing(&self, ray: &Ray) -> Option<(f64, Face)> {
        let a = self.apex();
        let o = ray.origin();
        let u = ray.direction();
        let crossing = |face| {
            let n = self.face_normal(face);
            let towards = n.dot(u);
            (towards > 0.0).then(|| n.dot(a - o) / towards)
        };
        match (crossing(Face::Upper), crossing(Face::Lower)) {
            (Some(tu), Some(td)) if tu == td => Some((tu, Face::Apex)),
            (Some(tu), Some(td)) if tu < td => Some((tu, Face::Upper)),
            (Some(_), Some(td)) => Some((td, Face::Lower)),
            (Some(tu), None) => Some((tu, Face::Upper)),
            (None, Some(td)) => Some((td, Face::Lower)),
            (None, None) => None,
        }
    }

    /// Refracts a ray travelling inside the glass at whichever exit face it
    /// meets first. The returned ray starts on that face.
    pub fn refract(&self, ray: &Ray) -> std::result::Result<(Ray, Face), Lost> {
        let (t, face) = self.exit_crossing(ray).ok_or(Lost::Missed)?;
        let exit = ray.at(t);
        let direction = match face {
            Face::Apex => ray.direction(),
            _ => refract(
                ray.direction(),
                self.face_normal(face),
                self.refractive_index,
                1.0,
            )?,
        };
        Ok((
            Ray {
                origin: exit,
                direction,
            },
            face,
        ))
    }

    /// Traces a messenger emitted inside the glass at `emission` with angle
    /// `beta` to the screen plane x = `screen_x`. The arrival point is where
    /// the refracted ray meets the plane.
    pub fn trace(
        &self,
        emission: Point,
        beta: f64,
        screen_x: f64,
    ) -> std::result::Result<BiprismTrace, Lost> {
        let inside = Ray::from_angle(emission, beta);
        let (outgoing, face) = self.refract(&inside)?;
        let exit = outgoing.origin();
        let glass = free_path_length(emission, exit);
        let dir = outgoing.direction();
        if dir.x <= 0.0 {
            return Err(Lost::Missed);
        }
        let air = (screen_x - exit.x) / dir.x;
        if air < 0.0 {
            return Err(Lost::Missed);
        }
        let arrival = outgoing.at(air);
        let mut path = OpticalPath::new();
        path.push(glass, self.refractive_index)
            .map_err(|_| Lost::Missed)?;
        path.push(air, 1.0).map_err(|_| Lost::Missed)?;
        Ok(BiprismTrace {
            path,
            face,
            exit,
            arrival,
            outgoing,
        })
    }

    /// Angle toward the axis of a ray that left the source parallel to the
    /// axis, after refraction at either face.
    pub fn exit_deflection(&self) -> f64 {
        let h = self.half_angle();
        (self.refractive_index * h.sin()).asin() - h
    }

    /// Perpendicular distance from `source` to the plane of `face`.
    pub fn face_depth(&self, source: Point, face: Face) -> f64 {
        self.face_normal(face).dot(self.apex() - source)
    }

    /// Paraxial image of `source` seen through `face`: displaced along the
    /// face normal to the apparent depth `depth / n`.
    pub fn virtual_source(&self, source: Point, face: Face) -> Point {
        let n = self.refractive_index;
        let depth = self.face_depth(source, face);
        source + self.face_normal(face) * (depth * (1.0 - 1.0 / n))
    }

    /// Optical length of the glass part that the virtual-source picture
    /// replaces: `n·|SF| ≈ (n − 1/n)·depth + |VF|` for small angles.
    pub fn virtual_path_offset(&self, source: Point, face: Face) -> f64 {
        let n = self.refractive_index;
        (n - 1.0 / n) * self.face_depth(source, face)
    }

    /// Separation of the two virtual images of an on-axis source at
    /// x = `source_x`.
    pub fn virtual_source_separation(&self, source_x: f64) -> f64 {
        let s = Point::new(source_x, 0.0);
        let up = self.virtual_source(s, Face::Upper);
        let down = self.virtual_source(s, Face::Lower);
        up.y - down.y
    }

    /// Thin-prism estimate of the virtual-source separation for a source
    /// embedded in the glass at x = `source_x`: each half-prism deviates by
    /// (n − 1)·α/2 and the source sits at the apparent depth (X′ − x)/n.
    pub fn thin_prism_separation(&self, source_x: f64) -> f64 {
        let n = self.refractive_index;
        2.0 * ((self.apex_x - source_x) / n) * (n - 1.0) * self.half_angle().tan()
    }
}
