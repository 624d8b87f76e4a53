//! Flat TOML experiment files with explicit units on lengths and angles.
//!
//! ```toml
//! experiment = "biprism"
//! wavelength = "670nm"
//! sigma = "0.531mm"
//! screen_offset = "7mm"
//! seed = 3
//! ```
//!
//! Absent keys take the reference values of the chosen experiment; screen
//! extent and emission aperture follow from the geometry unless given.

use crate::detector::{Screen, ScreenGeometry};
use crate::error::{Error, Result};
use crate::geometry::BiprismSpec;
use crate::harness::{biprism_half_extent, presets, two_beam_half_extent, ExperimentConfig};
use crate::source::{Aperture, SourceKind};
use crate::units::{format_angle, format_length, parse_angle, parse_length};
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use toml::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    DoubleSlit,
    TwoBeam,
    Biprism,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::DoubleSlit => "double-slit",
            ExperimentKind::TwoBeam => "two-beam",
            ExperimentKind::Biprism => "biprism",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "double-slit" => Ok(ExperimentKind::DoubleSlit),
            "two-beam" => Ok(ExperimentKind::TwoBeam),
            "biprism" => Ok(ExperimentKind::Biprism),
            other => Err(Error::Config(format!("unknown experiment {other:?}"))),
        }
    }

    pub fn of(config: &ExperimentConfig) -> Self {
        match config.source.kind {
            SourceKind::DoubleSlit { .. } => ExperimentKind::DoubleSlit,
            SourceKind::GaussianTwin { .. } => ExperimentKind::TwoBeam,
            SourceKind::BiprismPoint { .. } => ExperimentKind::Biprism,
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::DoubleSlit => &["slit_width", "separation", "screen_radius"],
            ExperimentKind::TwoBeam => &["sigma", "separation", "screen_x"],
            ExperimentKind::Biprism => &[
                "sigma",
                "refractive_index",
                "summit_angle",
                "apex_x",
                "source_x",
                "screen_x",
                "screen_offset",
            ],
        }
    }
}

const COMMON_KEYS: &[&str] = &[
    "experiment",
    "wavelength",
    "screen_min",
    "screen_max",
    "aperture_min",
    "aperture_max",
    "detectors",
    "gamma",
    "events",
    "seed",
    "replicas",
];

/// Experiment settings with every field optional; [`ConfigDraft::build`]
/// fills the gaps.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigDraft {
    pub kind: ExperimentKind,
    pub wavelength: Option<f64>,
    pub slit_width: Option<f64>,
    pub separation: Option<f64>,
    pub sigma: Option<f64>,
    pub refractive_index: Option<f64>,
    pub summit_angle: Option<f64>,
    pub apex_x: Option<f64>,
    pub source_x: Option<f64>,
    pub screen_radius: Option<f64>,
    pub screen_x: Option<f64>,
    /// Screen distance beyond the biprism apex; ignored when `screen_x` is set.
    pub screen_offset: Option<f64>,
    pub screen_min: Option<f64>,
    pub screen_max: Option<f64>,
    pub aperture_min: Option<f64>,
    pub aperture_max: Option<f64>,
    pub detectors: Option<usize>,
    pub gamma: Option<f64>,
    pub events: Option<u64>,
    pub seed: Option<u64>,
    pub replicas: Option<u32>,
}

impl ConfigDraft {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            wavelength: None,
            slit_width: None,
            separation: None,
            sigma: None,
            refractive_index: None,
            summit_angle: None,
            apex_x: None,
            source_x: None,
            screen_radius: None,
            screen_x: None,
            screen_offset: None,
            screen_min: None,
            screen_max: None,
            aperture_min: None,
            aperture_max: None,
            detectors: None,
            gamma: None,
            events: None,
            seed: None,
            replicas: None,
        }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let kind = match table.get("experiment") {
            Some(Value::String(s)) => ExperimentKind::from_name(s)?,
            Some(_) => return Err(Error::Config("experiment must be a string".into())),
            None => return Err(Error::Config("missing key experiment".into())),
        };
        if let Some(key) = table
            .keys()
            .find(|k| !COMMON_KEYS.contains(&k.as_str()) && !kind.keys().contains(&k.as_str()))
        {
            return Err(Error::Config(format!(
                "key {key:?} does not apply to the {} experiment",
                kind.name()
            )));
        }
        let length = |k: &str| -> Result<Option<f64>> {
            match table.get(k) {
                None => Ok(None),
                Some(Value::String(s)) => parse_length(s).map(Some),
                Some(_) => Err(Error::Config(format!("{k} must be a length with a unit, e.g. \"670nm\""))),
            }
        };
        let angle = |k: &str| -> Result<Option<f64>> {
            match table.get(k) {
                None => Ok(None),
                Some(Value::String(s)) => parse_angle(s).map(Some),
                Some(_) => Err(Error::Config(format!("{k} must be an angle with a unit, e.g. \"1deg\""))),
            }
        };
        let real = |k: &str| -> Result<Option<f64>> {
            match table.get(k) {
                None => Ok(None),
                Some(Value::Float(f)) => Ok(Some(*f)),
                Some(Value::Integer(i)) => Ok(Some(*i as f64)),
                Some(_) => Err(Error::Config(format!("{k} must be a number"))),
            }
        };
        let integer = |k: &str| -> Result<Option<u64>> {
            match table.get(k) {
                None => Ok(None),
                Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
                Some(Value::String(s)) => s
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::Config(format!("{k} must be a non-negative integer"))),
                Some(_) => Err(Error::Config(format!("{k} must be a non-negative integer"))),
            }
        };
        let screen_coordinate = |k: &str| match kind {
            ExperimentKind::DoubleSlit => angle(k),
            _ => length(k),
        };
        Ok(Self {
            kind,
            wavelength: length("wavelength")?,
            slit_width: length("slit_width")?,
            separation: length("separation")?,
            sigma: length("sigma")?,
            refractive_index: real("refractive_index")?,
            summit_angle: angle("summit_angle")?,
            apex_x: length("apex_x")?,
            source_x: length("source_x")?,
            screen_radius: length("screen_radius")?,
            screen_x: length("screen_x")?,
            screen_offset: length("screen_offset")?,
            screen_min: screen_coordinate("screen_min")?,
            screen_max: screen_coordinate("screen_max")?,
            aperture_min: angle("aperture_min")?,
            aperture_max: angle("aperture_max")?,
            detectors: integer("detectors")?.map(|v| v as usize),
            gamma: real("gamma")?,
            events: integer("events")?,
            seed: integer("seed")?,
            replicas: integer("replicas")?
                .map(|v| u32::try_from(v).map_err(|_| Error::Config("too many replicas".into())))
                .transpose()?,
        })
    }

    /// Resolves defaults and validates the result.
    pub fn build(&self) -> Result<ExperimentConfig> {
        let wavelength = self.wavelength.unwrap_or(presets::WAVELENGTH);
        let mut config = match self.kind {
            ExperimentKind::DoubleSlit => {
                let radius = self.screen_radius.unwrap_or(presets::DOUBLE_SLIT_RADIUS);
                let mut c = ExperimentConfig::double_slit();
                c.source.kind = SourceKind::DoubleSlit {
                    slit_width: self.slit_width.unwrap_or(presets::DOUBLE_SLIT_WIDTH),
                    separation: self.separation.unwrap_or(presets::DOUBLE_SLIT_SEPARATION),
                };
                c.source.aperture = self.aperture(-FRAC_PI_2, FRAC_PI_2);
                c.screen = Screen {
                    geometry: ScreenGeometry::Semicircle { radius },
                    lo: self.screen_min.unwrap_or(-FRAC_PI_2),
                    hi: self.screen_max.unwrap_or(FRAC_PI_2),
                };
                c
            }
            ExperimentKind::TwoBeam => {
                let sigma = self.sigma.unwrap_or(presets::TWO_BEAM_SIGMA);
                let separation = self.separation.unwrap_or(presets::TWO_BEAM_SEPARATION);
                let x = self.screen_x.unwrap_or(presets::TWO_BEAM_DISTANCE);
                let h = two_beam_half_extent(separation, sigma, x, wavelength);
                let (lo, hi) = (self.screen_min.unwrap_or(-h), self.screen_max.unwrap_or(h));
                let cone = |y: f64| (y / x).atan();
                let mut c = ExperimentConfig::two_beam();
                c.source.kind = SourceKind::GaussianTwin { sigma, separation };
                c.source.aperture = self.aperture(cone(lo), cone(hi));
                c.screen = Screen {
                    geometry: ScreenGeometry::Plane { x },
                    lo,
                    hi,
                };
                c
            }
            ExperimentKind::Biprism => {
                let biprism = BiprismSpec {
                    summit_angle: self
                        .summit_angle
                        .unwrap_or(presets::BIPRISM_SUMMIT_ANGLE_DEG.to_radians()),
                    refractive_index: self.refractive_index.unwrap_or(presets::BIPRISM_INDEX),
                    apex_x: self.apex_x.unwrap_or(presets::BIPRISM_APEX_X),
                };
                let sigma = self.sigma.unwrap_or(presets::BIPRISM_SIGMA);
                let x = self
                    .screen_x
                    .unwrap_or(biprism.apex_x + self.screen_offset.unwrap_or(presets::BIPRISM_SCREEN_OFFSETS[0]));
                let h = biprism_half_extent(&biprism, sigma, x);
                let half = biprism.summit_angle / 2.0;
                let mut c = ExperimentConfig::biprism(presets::BIPRISM_SCREEN_OFFSETS[0]);
                c.source.kind = SourceKind::BiprismPoint {
                    sigma,
                    biprism,
                    source_x: self.source_x.unwrap_or(presets::BIPRISM_SOURCE_X),
                };
                c.source.aperture = self.aperture(-half, half);
                c.screen = Screen {
                    geometry: ScreenGeometry::Plane { x },
                    lo: self.screen_min.unwrap_or(-h),
                    hi: self.screen_max.unwrap_or(h),
                };
                c
            }
        };
        config.source.wavelength = wavelength;
        if let Some(n) = self.detectors {
            config.detector_count = n;
        }
        if let Some(g) = self.gamma {
            config.gamma = g;
        }
        if let Some(e) = self.events {
            config.total_events = e;
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if let Some(r) = self.replicas {
            config.replicas = r;
        }
        config.validate()?;
        Ok(config)
    }

    fn aperture(&self, min: f64, max: f64) -> Aperture {
        Aperture {
            min: self.aperture_min.unwrap_or(min),
            max: self.aperture_max.unwrap_or(max),
        }
    }
}

pub fn from_text(text: &str) -> Result<ExperimentConfig> {
    ConfigDraft::from_text(text)?.build()
}

/// Canonical text of `config`: every key explicit, fixed order, exact values.
pub fn to_text(config: &ExperimentConfig) -> String {
    let kind = ExperimentKind::of(config);
    let mut s = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    let quoted = |v: String| format!("\"{v}\"");
    line("experiment", quoted(kind.name().into()));
    line("wavelength", quoted(format_length(config.source.wavelength)));
    match config.source.kind {
        SourceKind::DoubleSlit {
            slit_width,
            separation,
        } => {
            line("slit_width", quoted(format_length(slit_width)));
            line("separation", quoted(format_length(separation)));
        }
        SourceKind::GaussianTwin { sigma, separation } => {
            line("sigma", quoted(format_length(sigma)));
            line("separation", quoted(format_length(separation)));
        }
        SourceKind::BiprismPoint {
            sigma,
            biprism,
            source_x,
        } => {
            line("sigma", quoted(format_length(sigma)));
            line("refractive_index", format!("{:?}", biprism.refractive_index));
            line("summit_angle", quoted(format_angle(biprism.summit_angle)));
            line("apex_x", quoted(format_length(biprism.apex_x)));
            line("source_x", quoted(format_length(source_x)));
        }
    }
    let coordinate = |v: f64| match config.screen.geometry {
        ScreenGeometry::Semicircle { .. } => format_angle(v),
        ScreenGeometry::Plane { .. } => format_length(v),
    };
    match config.screen.geometry {
        ScreenGeometry::Semicircle { radius } => line("screen_radius", quoted(format_length(radius))),
        ScreenGeometry::Plane { x } => line("screen_x", quoted(format_length(x))),
    }
    line("screen_min", quoted(coordinate(config.screen.lo)));
    line("screen_max", quoted(coordinate(config.screen.hi)));
    line("aperture_min", quoted(format_angle(config.source.aperture.min)));
    line("aperture_max", quoted(format_angle(config.source.aperture.max)));
    line("detectors", config.detector_count.to_string());
    line("gamma", format!("{:?}", config.gamma));
    line("events", config.total_events.to_string());
    line(
        "seed",
        if config.seed <= i64::MAX as u64 {
            config.seed.to_string()
        } else {
            quoted(config.seed.to_string())
        },
    );
    line("replicas", config.replicas.to_string());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn presets_round_trip() {
        let mut configs = vec![ExperimentConfig::double_slit(), ExperimentConfig::two_beam()];
        configs.extend(presets::BIPRISM_SCREEN_OFFSETS.map(ExperimentConfig::biprism));
        for c in configs {
            let text = to_text(&c);
            assert_eq!(from_text(&text).unwrap(), c, "{text}");
        }
    }

    #[test]
    fn minimal_files_take_reference_values() {
        assert_eq!(
            from_text("experiment = \"double-slit\"").unwrap(),
            ExperimentConfig::double_slit()
        );
        assert_eq!(
            from_text("experiment = \"two-beam\"").unwrap(),
            ExperimentConfig::two_beam()
        );
        let c = from_text("experiment = \"biprism\"\nscreen_offset = \"55mm\"\n").unwrap();
        assert_eq!(c, ExperimentConfig::biprism(55e-3));
    }

    #[test]
    fn written_units_match_reference_literals() {
        let text = "experiment = \"biprism\"\nwavelength = \"670nm\"\nsigma = \"0.531mm\"\n\
                    summit_angle = \"1deg\"\napex_x = \"45mm\"\nrefractive_index = 1.5631\n";
        assert_eq!(from_text(text).unwrap(), ExperimentConfig::biprism(7e-3));
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "",
            "experiment = \"laser\"",
            "experiment = \"double-slit\"\nsigma = \"1um\"",
            "experiment = \"double-slit\"\nwavelength = 670",
            "experiment = \"double-slit\"\nwavelength = \"670\"",
            "experiment = \"double-slit\"\ngamma = 1.5",
            "experiment = \"two-beam\"\ndetectors = -3",
            "experiment = \"two-beam\"\nbogus = 1",
            "not toml at all [",
        ] {
            assert!(from_text(text).is_err(), "{text}");
        }
    }

    proptest! {
        #[test]
        fn arbitrary_biprism_configs_round_trip(
            offset in 1e-3f64..0.2,
            sigma in 1e-5f64..1e-3,
            n in 1.01f64..2.0,
            alpha in 0.1f64..5.0,
            seed in any::<u64>(),
            gamma in 0.5f64..0.9999,
        ) {
            let mut d = ConfigDraft::new(ExperimentKind::Biprism);
            d.screen_offset = Some(offset);
            d.sigma = Some(sigma);
            d.refractive_index = Some(n);
            d.summit_angle = Some(alpha.to_radians());
            d.seed = Some(seed);
            d.gamma = Some(gamma);
            let c = d.build().unwrap();
            prop_assert_eq!(from_text(&to_text(&c)).unwrap(), c);
        }
    }
}
