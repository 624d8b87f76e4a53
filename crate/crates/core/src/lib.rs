//! Event-by-event simulation of single-photon interference.
//!
//! Messengers leave a source one at a time, carry a phase proportional to
//! their optical path, and are registered by adaptive threshold detectors
//! that learn from the phases they receive. No wave amplitudes enter the
//! simulation, yet the click counts build up the interference patterns that
//! wave theory predicts for a double slit, two Gaussian beams and a Fresnel
//! biprism. The [`wave`] module holds those predictions and [`harness`]
//! runs experiments and compares the two.

// `!(x <= y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod detector;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod harness;
pub mod profile;
pub mod quadrature;
pub mod rng;
pub mod source;
pub mod stats;
pub mod units;
pub mod wave;

pub use config::{ConfigDraft, ExperimentKind};
pub use detector::{DetectorArray, DetectorState, Screen, ScreenGeometry, Window};
pub use error::{Error, Result};
pub use fit::{fit_and_compare, FitReport};
pub use geometry::{BiprismSpec, OpticalPath, Point, Ray, Vec2};
pub use harness::{analyze, replica_merge, run, run_replica, Analysis, ExperimentConfig};
pub use profile::CountsProfile;
pub use rng::{rng_stream, UniformStream};
pub use source::{Aperture, Experiment, Message, SourceKind, SourceSpec};
pub use wave::{sample_profile, TheoryProfile, WaveOracle};
