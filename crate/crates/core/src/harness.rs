//! Experiment configuration, the event loop and comparison with wave theory.

use crate::config;
use crate::detector::{validate_gamma, DetectorArray, Screen, ScreenGeometry};
use crate::error::{invalid, Error, Result};
use crate::fit::{fit_and_compare_with, FitReport, FringeOptions};
use crate::geometry::{BiprismSpec, Lost};
use crate::profile::CountsProfile;
use crate::quadrature::SimpsonOptions;
use crate::rng::{emission_stream_id, rng_stream};
use crate::source::{Aperture, Experiment, SourceKind, SourceSpec};
use crate::wave::{gaussian_divergence_weight, sample_profile, BiprismGeometry, Kernel, TheoryProfile, WaveOracle};
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

/// Parameters of the reference experiments.
pub mod presets {
    pub const WAVELENGTH: f64 = 670e-9;
    pub const GAMMA: f64 = 0.999;
    pub const EVENTS: u64 = 10_000_000;

    pub const DOUBLE_SLIT_WIDTH: f64 = WAVELENGTH;
    pub const DOUBLE_SLIT_SEPARATION: f64 = 5.0 * WAVELENGTH;
    pub const DOUBLE_SLIT_RADIUS: f64 = 0.05e-3;
    pub const DOUBLE_SLIT_DETECTORS: usize = 181;

    pub const TWO_BEAM_SEPARATION: f64 = 8.0 * WAVELENGTH;
    pub const TWO_BEAM_SIGMA: f64 = WAVELENGTH;
    pub const TWO_BEAM_DISTANCE: f64 = 0.1e-3;
    pub const TWO_BEAM_DETECTORS: usize = 200;

    pub const BIPRISM_INDEX: f64 = 1.5631;
    /// One degree.
    pub const BIPRISM_SUMMIT_ANGLE_DEG: f64 = 1.0;
    pub const BIPRISM_APEX_X: f64 = 45e-3;
    pub const BIPRISM_SIGMA: f64 = 0.531e-3;
    pub const BIPRISM_SOURCE_X: f64 = 0.0;
    pub const BIPRISM_DETECTORS: usize = 1000;
    pub const BIPRISM_SCREEN_OFFSETS: [f64; 3] = [7e-3, 15e-3, 55e-3];
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub source: SourceSpec,
    pub screen: Screen,
    pub detector_count: usize,
    pub gamma: f64,
    /// Events per replica.
    pub total_events: u64,
    pub seed: u64,
    pub replicas: u32,
}

/// Half-width of the plane screen for two Gaussian beams: the outer beam
/// envelope out to four standard deviations.
pub fn two_beam_half_extent(separation: f64, sigma: f64, distance: f64, wavelength: f64) -> f64 {
    let b = gaussian_divergence_weight(sigma, distance, wavelength);
    separation / 2.0 + 4.0 * sigma / (2.0 * b).sqrt()
}

/// Half-width of the plane screen behind the biprism: the overlap region of
/// the two pencils plus four standard deviations of the source intensity.
pub fn biprism_half_extent(biprism: &BiprismSpec, sigma: f64, screen_x: f64) -> f64 {
    biprism.exit_deflection() * (screen_x - biprism.apex_x) + 4.0 * sigma / 2f64.sqrt()
}

impl ExperimentConfig {
    pub fn double_slit() -> Self {
        use presets::*;
        Self {
            source: SourceSpec {
                kind: SourceKind::DoubleSlit {
                    slit_width: DOUBLE_SLIT_WIDTH,
                    separation: DOUBLE_SLIT_SEPARATION,
                },
                wavelength: WAVELENGTH,
                aperture: Aperture {
                    min: -FRAC_PI_2,
                    max: FRAC_PI_2,
                },
            },
            screen: Screen {
                geometry: ScreenGeometry::Semicircle {
                    radius: DOUBLE_SLIT_RADIUS,
                },
                lo: -FRAC_PI_2,
                hi: FRAC_PI_2,
            },
            detector_count: DOUBLE_SLIT_DETECTORS,
            gamma: GAMMA,
            total_events: EVENTS,
            seed: 1,
            replicas: 1,
        }
    }

    pub fn two_beam() -> Self {
        use presets::*;
        let h = two_beam_half_extent(TWO_BEAM_SEPARATION, TWO_BEAM_SIGMA, TWO_BEAM_DISTANCE, WAVELENGTH);
        let cone = (h / TWO_BEAM_DISTANCE).atan();
        Self {
            source: SourceSpec {
                kind: SourceKind::GaussianTwin {
                    sigma: TWO_BEAM_SIGMA,
                    separation: TWO_BEAM_SEPARATION,
                },
                wavelength: WAVELENGTH,
                aperture: Aperture { min: -cone, max: cone },
            },
            screen: Screen {
                geometry: ScreenGeometry::Plane { x: TWO_BEAM_DISTANCE },
                lo: -h,
                hi: h,
            },
            detector_count: TWO_BEAM_DETECTORS,
            gamma: GAMMA,
            total_events: EVENTS,
            seed: 1,
            replicas: 1,
        }
    }

    /// Biprism experiment with the screen `screen_offset` beyond the apex.
    pub fn biprism(screen_offset: f64) -> Self {
        use presets::*;
        let biprism = BiprismSpec {
            summit_angle: BIPRISM_SUMMIT_ANGLE_DEG.to_radians(),
            refractive_index: BIPRISM_INDEX,
            apex_x: BIPRISM_APEX_X,
        };
        let screen_x = BIPRISM_APEX_X + screen_offset;
        let h = biprism_half_extent(&biprism, BIPRISM_SIGMA, screen_x);
        let half = biprism.summit_angle / 2.0;
        Self {
            source: SourceSpec {
                kind: SourceKind::BiprismPoint {
                    sigma: BIPRISM_SIGMA,
                    biprism,
                    source_x: BIPRISM_SOURCE_X,
                },
                wavelength: WAVELENGTH,
                aperture: Aperture { min: -half, max: half },
            },
            screen: Screen {
                geometry: ScreenGeometry::Plane { x: screen_x },
                lo: -h,
                hi: h,
            },
            detector_count: BIPRISM_DETECTORS,
            gamma: GAMMA,
            total_events: EVENTS,
            seed: 1,
            replicas: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| match e {
            Error::InvalidParameter(m) => Error::Config(m),
            other => other,
        };
        self.screen.validate().map_err(wrap)?;
        Experiment::new(self.source, self.screen.geometry).map_err(wrap)?;
        validate_gamma(self.gamma).map_err(wrap)?;
        if self.detector_count < 2 {
            return Err(Error::Config("at least two detectors are required".into()));
        }
        if self.total_events < self.detector_count as u64 {
            return Err(Error::Config(format!(
                "{} events cannot cover {} detectors",
                self.total_events, self.detector_count
            )));
        }
        if self.replicas == 0 {
            return Err(Error::Config("at least one replica is required".into()));
        }
        Ok(())
    }

    pub fn experiment(&self) -> Result<Experiment> {
        Experiment::new(self.source, self.screen.geometry)
    }

    /// Wave-theory counterpart of this experiment.
    pub fn wave_oracle(&self) -> Result<WaveOracle> {
        let wavelength = self.source.wavelength;
        match (self.source.kind, self.screen.geometry) {
            (
                SourceKind::DoubleSlit {
                    slit_width,
                    separation,
                },
                ScreenGeometry::Semicircle { .. },
            ) => Ok(WaveOracle::DoubleSlit {
                slit_width,
                separation,
                wavelength,
            }),
            (SourceKind::GaussianTwin { sigma, separation }, ScreenGeometry::Plane { x }) => {
                Ok(WaveOracle::GaussianTwin {
                    separation,
                    sigma,
                    distance: x,
                    wavelength,
                })
            }
            (
                SourceKind::BiprismPoint {
                    sigma,
                    biprism,
                    source_x,
                },
                ScreenGeometry::Plane { x },
            ) => Ok(WaveOracle::Biprism(BiprismGeometry {
                biprism,
                sigma,
                source_x,
                screen_x: x,
                wavelength,
                aperture: self.source.aperture,
                kernel: Kernel::Exact,
                quadrature: SimpsonOptions::default(),
            })),
            _ => Err(invalid("no wave-theory profile for this source and screen")),
        }
    }

    /// Hex SHA-256 of the canonical configuration text.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(config::to_text(self).as_bytes()))
    }
}

/// Runs one replica: `total_events` strictly sequential emissions on the
/// replica's own streams.
pub fn run_replica(config: &ExperimentConfig, replica: u32) -> Result<CountsProfile> {
    config.validate()?;
    let experiment = config.experiment()?;
    let mut array = DetectorArray::new(config.screen, config.detector_count, config.gamma, config.seed, replica)?;
    let mut rng = rng_stream(config.seed, emission_stream_id(replica));
    let mut absorbed = 0u64;
    for _ in 0..config.total_events {
        match experiment.next_message(&mut rng) {
            Ok(message) => {
                array.receive(&message)?;
            }
            Err(Lost::Absorbed) => absorbed += 1,
            Err(Lost::Missed) => array.tally_off_screen(),
        }
    }
    let mut profile = array.counts_profile();
    profile.absorbed = absorbed;
    profile.total_events = config.total_events;
    profile.check_conservation()?;
    Ok(profile)
}

/// Runs all replicas concurrently and merges them in replica order.
pub fn run(config: &ExperimentConfig) -> Result<CountsProfile> {
    config.validate()?;
    let start = Instant::now();
    let parts = (0..config.replicas)
        .into_par_iter()
        .map(|r| run_replica(config, r))
        .collect::<Result<Vec<_>>>()?;
    let profile = replica_merge(&parts)?;
    log::info!(
        "seed={} config_digest={} events={} off_screen={} absorbed={} wall_time={:.3}s",
        config.seed,
        config.digest(),
        profile.total_events,
        profile.off_screen,
        profile.absorbed,
        start.elapsed().as_secs_f64()
    );
    Ok(profile)
}

/// Element-wise sum of replica profiles taken on the same screen.
pub fn replica_merge(profiles: &[CountsProfile]) -> Result<CountsProfile> {
    CountsProfile::merge(profiles)
}

/// Theory sampled at the detector centres, fit report, and the profile with
/// its theory columns filled.
#[derive(Clone, Debug, PartialEq)]
pub struct Analysis {
    pub profile: CountsProfile,
    pub theory: TheoryProfile,
    pub report: FitReport,
}

/// Compares `profile` with the wave theory of `config`.
pub fn analyze(config: &ExperimentConfig, profile: &CountsProfile) -> Result<Analysis> {
    let oracle = config.wave_oracle()?;
    let theory = sample_profile(&oracle, &profile.coordinates())?;
    let options = FringeOptions {
        period_hint: match oracle {
            WaveOracle::Biprism(g) => Some(g.predicted_period()),
            _ => None,
        },
    };
    let report = fit_and_compare_with(profile, &theory, &options)?;
    let mut profile = profile.clone();
    profile.theory = Some(theory.intensities.clone());
    profile.theory_fitted = Some(theory.intensities.iter().map(|i| report.scale * i).collect());
    Ok(Analysis {
        profile,
        theory,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mut c: ExperimentConfig, events: u64) -> ExperimentConfig {
        c.total_events = events;
        c
    }

    #[test]
    fn presets_are_valid() {
        ExperimentConfig::double_slit().validate().unwrap();
        ExperimentConfig::two_beam().validate().unwrap();
        for off in presets::BIPRISM_SCREEN_OFFSETS {
            ExperimentConfig::biprism(off).validate().unwrap();
        }
    }

    #[test]
    fn config_invariants() {
        let mut c = ExperimentConfig::double_slit();
        c.gamma = 1.5;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = ExperimentConfig::double_slit();
        c.detector_count = 1;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::double_slit();
        c.total_events = 100;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::double_slit();
        c.total_events = 0;
        assert!(run(&c).is_err());
    }

    #[test]
    fn single_event_lands_somewhere() {
        let mut c = small(ExperimentConfig::two_beam(), 2);
        c.detector_count = 2;
        c.total_events = 2;
        let p = run(&c).unwrap();
        assert_eq!(p.total_received() + p.off_screen + p.absorbed, 2);
    }

    #[test]
    fn runs_are_reproducible() {
        let c = small(ExperimentConfig::biprism(7e-3), 20_000);
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
        let mut other = c;
        other.seed = 2;
        assert_ne!(run(&other).unwrap().fired(), a.fired());
    }

    #[test]
    fn replicas_merge_in_any_grouping() {
        let mut c = small(ExperimentConfig::double_slit(), 5_000);
        c.replicas = 3;
        let all = run(&c).unwrap();
        let parts: Vec<_> = (0..3).map(|r| run_replica(&c, r).unwrap()).collect();
        assert_eq!(replica_merge(&parts).unwrap(), all);
        let reversed: Vec<_> = parts.iter().rev().cloned().collect();
        assert_eq!(replica_merge(&reversed).unwrap(), all);
        let mut empty = parts[0].clone();
        for r in &mut empty.rows {
            r.received = 0;
            r.fired = 0;
        }
        empty.off_screen = 0;
        empty.absorbed = 0;
        empty.total_events = 0;
        assert_eq!(replica_merge(&[parts[0].clone(), empty]).unwrap(), parts[0]);
    }

    #[test]
    fn digest_tracks_configuration() {
        let a = ExperimentConfig::double_slit();
        let mut b = a;
        b.seed = 99;
        assert_eq!(a.digest(), ExperimentConfig::double_slit().digest());
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn analysis_fills_theory_columns() {
        let c = small(ExperimentConfig::double_slit(), 200_000);
        let p = run(&c).unwrap();
        let a = analyze(&c, &p).unwrap();
        let fitted = a.profile.theory_fitted.as_ref().unwrap();
        assert_eq!(fitted.len(), c.detector_count);
        assert!(a.report.scale > 0.0);
        assert!(a.report.normalized_rmse < 0.5);
    }
}
