//! Wave-theory intensity profiles used as ground truth for the event data.
//!
//! Closed forms cover the Fraunhofer double slit and two Gaussian line
//! sources in the Fresnel approximation. The biprism has no closed form; its
//! profile is the coherent sum of the two pencils leaving the exit faces, each
//! written as a Gaussian line current seen from its virtual source and
//! integrated numerically over the source.

use crate::error::{invalid, Result};
use crate::geometry::{BiprismSpec, Face, Point};
use crate::quadrature::{simpson, SimpsonOptions};
use crate::source::Aperture;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Source profiles are integrated over ±`SOURCE_SPAN` standard deviations.
const SOURCE_SPAN: f64 = 8.0;

/// Grid used to locate the edges of a pencil's contributing source interval.
const SUPPORT_GRID: usize = 512;

/// Fraunhofer double-slit intensity with unit prefactor. `theta` is the
/// angular screen position.
pub fn double_slit_intensity(theta: f64, slit_width: f64, separation: f64, wavelength: f64) -> f64 {
    let k = TAU / wavelength;
    let s = theta.sin();
    let x = 0.5 * k * slit_width * s;
    let sinc = if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    };
    let c = (0.5 * k * separation * s).cos();
    sinc * sinc * c * c
}

/// Divergence weight `b = k²σ⁴ / (X² + k²σ⁴)` of a Gaussian line source of
/// standard deviation `sigma` observed at distance `distance`.
pub fn gaussian_divergence_weight(sigma: f64, distance: f64, wavelength: f64) -> f64 {
    let k = TAU / wavelength;
    let z_r = k * sigma * sigma;
    z_r * z_r / (distance * distance + z_r * z_r)
}

/// Intensity of two Gaussian line sources at ±`separation`/2 on a plane
/// screen at distance `distance`, with unit prefactor.
pub fn gaussian_twin_intensity(y: f64, separation: f64, sigma: f64, distance: f64, wavelength: f64) -> f64 {
    let k = TAU / wavelength;
    let b = gaussian_divergence_weight(sigma, distance, wavelength);
    let s2 = sigma * sigma;
    let z = b * y * separation / s2;
    let w = b * (y * y + separation * separation / 4.0) / s2;
    // cosh(z)·e^{-w} without overflowing for large |z|.
    let envelope = 0.5 * ((z - w).exp() + (-z - w).exp());
    let fringes = ((1.0 - b) * k * y * separation / distance).cos() * (-w).exp();
    envelope + fringes
}

/// Whether separation and width are small against the distance, where the
/// two-Gaussian closed form is derived.
pub fn gaussian_twin_in_regime(separation: f64, sigma: f64, distance: f64) -> bool {
    separation <= 0.1 * distance && sigma <= 0.1 * distance
}

/// Fringe period on the screen produced by two coherent Gaussian sources of
/// width `sigma`, separated by `separation`, a distance `distance` from the
/// screen, whose beams are tilted toward each other by `tilt` each.
///
/// Reduces to `λ·distance/separation` for point sources and to
/// `λ / (2 sin tilt)` for collimated beams.
pub fn gaussian_pair_fringe_period(
    wavelength: f64,
    separation: f64,
    distance: f64,
    sigma: f64,
    tilt: f64,
) -> f64 {
    let b = gaussian_divergence_weight(sigma, distance, wavelength);
    wavelength / (2.0 * b * tilt.sin() + (1.0 - b) * separation / distance)
}

/// Interference maxima of the double-slit pattern closest to θ = 0, sorted.
/// The `count` central ones are returned.
pub fn double_slit_maxima(slit_width: f64, separation: f64, wavelength: f64, count: usize) -> Vec<f64> {
    let f = |t: f64| double_slit_intensity(t, slit_width, separation, wavelength);
    let mut out = Vec::with_capacity(count);
    let half = count as i64 / 2;
    for m in -(half + 1)..=(half + 1) {
        let s = m as f64 * wavelength / separation;
        if s.abs() >= 1.0 {
            continue;
        }
        let centre = s.asin();
        // The sinc factor only pulls a maximum within a quarter of the
        // cos² period around sin θ = mλ/d.
        let q = 0.25 * wavelength / separation;
        let lo = (s - q).max(-1.0).asin();
        let hi = (s + q).min(1.0).asin();
        let t = golden_max(f, lo, hi);
        if f(t) > 1e-12 {
            out.push((t, centre.abs()));
        }
    }
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    out.truncate(count);
    let mut pos: Vec<f64> = out.into_iter().map(|(t, _)| t).collect();
    pos.sort_by(f64::total_cmp);
    pos
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Distance kernel used when summing pencils.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    /// Euclidean distance.
    Exact,
    /// Paraxial expansion `Δx + Δy²/(2Δx)`.
    Fresnel,
}

impl Kernel {
    #[inline]
    fn distance(self, from: Point, to: Point) -> f64 {
        let dx = to.x - from.x;
        let dy = to.y - from.y;
        match self {
            Kernel::Exact => dx.hypot(dy),
            Kernel::Fresnel => dx + dy * dy / (2.0 * dx),
        }
    }
}

/// A coherent Gaussian line current `exp(-(u - centre)²/2σ²)` radiating to
/// the screen.
trait Pencil: Sync {
    /// Source interval contributing at `p`, if any.
    fn support(&self, p: Point) -> Option<(f64, f64)>;
    fn current(&self, u: f64) -> f64;
    fn optical_length(&self, u: f64, p: Point) -> f64;
}

#[derive(Clone, Copy, Debug)]
struct FreeLine {
    x: f64,
    centre: f64,
    sigma: f64,
    kernel: Kernel,
}

impl Pencil for FreeLine {
    fn support(&self, _: Point) -> Option<(f64, f64)> {
        let h = SOURCE_SPAN * self.sigma;
        Some((self.centre - h, self.centre + h))
    }

    fn current(&self, u: f64) -> f64 {
        let z = (u - self.centre) / self.sigma;
        (-0.5 * z * z).exp()
    }

    fn optical_length(&self, u: f64, p: Point) -> f64 {
        self.kernel.distance(Point::new(self.x, u), p)
    }
}

/// The part of a Gaussian source inside the biprism that leaves through one
/// face, represented by its virtual source.
#[derive(Clone, Copy, Debug)]
struct FacePencil {
    biprism: BiprismSpec,
    face: Face,
    source_x: f64,
    sigma: f64,
    aperture: Aperture,
    kernel: Kernel,
}

impl FacePencil {
    /// Whether the straight line from the virtual image of source point `u`
    /// to `p` crosses this face, at an emission angle inside the aperture.
    fn contributes(&self, u: f64, p: Point) -> bool {
        let s = Point::new(self.source_x, u);
        let v = self.biprism.virtual_source(s, self.face);
        let normal = self.biprism.face_normal(self.face);
        let w = p - v;
        let towards = normal.dot(w);
        if towards <= 0.0 {
            return false;
        }
        let f = v + w * (normal.dot(self.biprism.apex() - v) / towards);
        let on_face = match self.face {
            Face::Upper => f.y >= 0.0,
            Face::Lower => f.y <= 0.0,
            Face::Apex => false,
        };
        on_face && self.aperture.contains((f.y - u).atan2(f.x - self.source_x))
    }
}

impl Pencil for FacePencil {
    fn support(&self, p: Point) -> Option<(f64, f64)> {
        let h = SOURCE_SPAN * self.sigma;
        let grid = |i: usize| -h + 2.0 * h * (i as f64 / SUPPORT_GRID as f64);
        let valid: Vec<bool> = (0..=SUPPORT_GRID).map(|i| self.contributes(grid(i), p)).collect();
        let first = valid.iter().position(|&v| v)?;
        let last = valid.iter().rposition(|&v| v)?;
        let edge = |inside: f64, outside: f64| {
            let (mut a, mut b) = (inside, outside);
            for _ in 0..64 {
                let m = 0.5 * (a + b);
                if m == a || m == b {
                    break;
                }
                if self.contributes(m, p) {
                    a = m;
                } else {
                    b = m;
                }
            }
            a
        };
        let lo = if first == 0 { -h } else { edge(grid(first), grid(first - 1)) };
        let hi = if last == SUPPORT_GRID { h } else { edge(grid(last), grid(last + 1)) };
        Some((lo, hi))
    }

    fn current(&self, u: f64) -> f64 {
        let z = u / self.sigma;
        (-0.5 * z * z).exp()
    }

    fn optical_length(&self, u: f64, p: Point) -> f64 {
        let s = Point::new(self.source_x, u);
        let v = self.biprism.virtual_source(s, self.face);
        self.biprism.virtual_path_offset(s, self.face) + self.kernel.distance(v, p)
    }
}

/// Coherent sum of pencil amplitudes at `p`. Phases are referenced to
/// `reference` so that large optical lengths do not cost precision.
fn superpose(
    pencils: &[&dyn Pencil],
    p: Point,
    reference: f64,
    wavelength: f64,
    opts: &SimpsonOptions,
) -> Result<Complex64> {
    let k = TAU / wavelength;
    let mut total = Complex64::new(0.0, 0.0);
    for pencil in pencils {
        let Some((lo, hi)) = pencil.support(p) else {
            continue;
        };
        total += simpson(
            |u| Complex64::from_polar(pencil.current(u), k * (pencil.optical_length(u, p) - reference)),
            lo,
            hi,
            opts,
        )?;
    }
    Ok(total)
}

/// Geometry of the biprism experiment as seen by the wave oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiprismGeometry {
    pub biprism: BiprismSpec,
    pub sigma: f64,
    pub source_x: f64,
    pub screen_x: f64,
    pub wavelength: f64,
    /// Emission angles admitted by the source; rays outside form no pencil.
    pub aperture: Aperture,
    pub kernel: Kernel,
    pub quadrature: SimpsonOptions,
}

impl BiprismGeometry {
    fn pencils(&self) -> [FacePencil; 2] {
        [Face::Upper, Face::Lower].map(|face| FacePencil {
            biprism: self.biprism,
            face,
            source_x: self.source_x,
            sigma: self.sigma,
            aperture: self.aperture,
            kernel: self.kernel,
        })
    }

    /// Distance from the virtual sources to the screen plane.
    pub fn virtual_distance(&self) -> f64 {
        let v = self
            .biprism
            .virtual_source(Point::new(self.source_x, 0.0), Face::Upper);
        self.screen_x - v.x
    }

    /// Fringe period predicted by two virtual Gaussian sources whose beams
    /// cross at the exit deflection angle.
    pub fn predicted_period(&self) -> f64 {
        gaussian_pair_fringe_period(
            self.wavelength,
            self.biprism.virtual_source_separation(self.source_x),
            self.virtual_distance(),
            self.sigma,
            self.biprism.exit_deflection(),
        )
    }

    /// Fringe period of two point sources at the virtual-source separation.
    pub fn point_source_period(&self) -> f64 {
        self.wavelength * self.virtual_distance() / self.biprism.virtual_source_separation(self.source_x)
    }
}

/// Squared magnitude of the summed pencil amplitudes at screen height `y`.
pub fn biprism_intensity(y: f64, geometry: &BiprismGeometry) -> Result<f64> {
    let [up, down] = geometry.pencils();
    let p = Point::new(geometry.screen_x, y);
    let reference = geometry.screen_x - geometry.source_x;
    let a = superpose(&[&up, &down], p, reference, geometry.wavelength, &geometry.quadrature)?;
    Ok(a.norm_sqr())
}

/// Two untilted Gaussian virtual sources at ±`separation`/2 on x = 0 summed
/// numerically. The same superposition as [`biprism_intensity`] with the
/// virtual-source geometry given directly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VirtualPair {
    pub separation: f64,
    pub sigma: f64,
    pub distance: f64,
    pub wavelength: f64,
    pub kernel: Kernel,
    pub quadrature: SimpsonOptions,
}

pub fn virtual_pair_intensity(y: f64, pair: &VirtualPair) -> Result<f64> {
    let line = |centre| FreeLine {
        x: 0.0,
        centre,
        sigma: pair.sigma,
        kernel: pair.kernel,
    };
    let (up, down) = (line(pair.separation / 2.0), line(-pair.separation / 2.0));
    let p = Point::new(pair.distance, y);
    let pencils: Vec<&dyn Pencil> = if pair.separation == 0.0 {
        vec![&up]
    } else {
        vec![&up, &down]
    };
    let a = superpose(&pencils, p, pair.distance, pair.wavelength, &pair.quadrature)?;
    Ok(a.norm_sqr())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WaveOracle {
    DoubleSlit {
        slit_width: f64,
        separation: f64,
        wavelength: f64,
    },
    GaussianTwin {
        separation: f64,
        sigma: f64,
        distance: f64,
        wavelength: f64,
    },
    VirtualPair(VirtualPair),
    Biprism(BiprismGeometry),
}

impl WaveOracle {
    pub fn validate(&self) -> Result<()> {
        let wavelength = match self {
            WaveOracle::DoubleSlit { wavelength, .. } | WaveOracle::GaussianTwin { wavelength, .. } => *wavelength,
            WaveOracle::VirtualPair(p) => p.wavelength,
            WaveOracle::Biprism(g) => g.wavelength,
        };
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(invalid("wavelength must be positive"));
        }
        if let WaveOracle::GaussianTwin {
            separation,
            sigma,
            distance,
            ..
        } = *self
        {
            if !gaussian_twin_in_regime(separation, sigma, distance) {
                log::warn!(
                    "two-beam closed form used outside d, σ ≪ X (d = {separation:e}, σ = {sigma:e}, X = {distance:e})"
                );
            }
        }
        Ok(())
    }

    pub fn intensity(&self, c: f64) -> Result<f64> {
        Ok(match self {
            WaveOracle::DoubleSlit {
                slit_width,
                separation,
                wavelength,
            } => double_slit_intensity(c, *slit_width, *separation, *wavelength),
            WaveOracle::GaussianTwin {
                separation,
                sigma,
                distance,
                wavelength,
            } => gaussian_twin_intensity(c, *separation, *sigma, *distance, *wavelength),
            WaveOracle::VirtualPair(pair) => virtual_pair_intensity(c, pair)?,
            WaveOracle::Biprism(g) => biprism_intensity(c, g)?,
        })
    }

    fn is_numerical(&self) -> bool {
        matches!(self, WaveOracle::VirtualPair(_) | WaveOracle::Biprism(_))
    }
}

/// Intensities sampled at screen positions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TheoryProfile {
    pub coordinates: Vec<f64>,
    pub intensities: Vec<f64>,
}

/// Evaluates `oracle` at each coordinate. The result does not depend on the
/// number of threads.
pub fn sample_profile(oracle: &WaveOracle, coordinates: &[f64]) -> Result<TheoryProfile> {
    oracle.validate()?;
    if coordinates.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("coordinates must be sorted"));
    }
    let intensities = if oracle.is_numerical() {
        coordinates
            .par_iter()
            .map(|&c| oracle.intensity(c))
            .collect::<Result<Vec<_>>>()?
    } else {
        coordinates
            .iter()
            .map(|&c| oracle.intensity(c))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(TheoryProfile {
        coordinates: coordinates.to_vec(),
        intensities,
    })
}
