//! Python bindings: run experiments, read profiles and fit reports, and drive
//! a single detector by hand.

use eventoptics::config::{self, ExperimentKind};
use eventoptics::units::{format_length, parse_length};
use eventoptics::{wave, CountsProfile, DetectorState, Error, ExperimentConfig, FitReport, Vec2, Window};
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyIOError::new_err(io.to_string()),
        e @ (Error::InvalidParameter(_) | Error::InvalidMessage { .. } | Error::Config(_) | Error::Parse(_)) => {
            PyValueError::new_err(e.to_string())
        }
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

/// A fully resolved, validated experiment.
#[pyclass(name = "Config", module = "eventoptics", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyConfig(ExperimentConfig);

#[pymethods]
impl PyConfig {
    #[staticmethod]
    fn double_slit() -> Self {
        Self(ExperimentConfig::double_slit())
    }

    #[staticmethod]
    fn two_beam() -> Self {
        Self(ExperimentConfig::two_beam())
    }

    /// `screen_offset` is a length such as "15mm".
    #[staticmethod]
    fn biprism(screen_offset: &str) -> PyResult<Self> {
        let offset = parse_length(screen_offset).map_err(to_py)?;
        let c = ExperimentConfig::biprism(offset);
        c.validate().map_err(to_py)?;
        Ok(Self(c))
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        config::from_text(text).map(Self).map_err(to_py)
    }

    fn to_toml(&self) -> String {
        config::to_text(&self.0)
    }

    /// Copy with the given settings replaced.
    #[pyo3(signature = (*, seed=None, events=None, detectors=None, gamma=None, replicas=None))]
    fn replace(
        &self,
        seed: Option<u64>,
        events: Option<u64>,
        detectors: Option<usize>,
        gamma: Option<f64>,
        replicas: Option<u32>,
    ) -> PyResult<Self> {
        let mut c = self.0;
        c.seed = seed.unwrap_or(c.seed);
        c.total_events = events.unwrap_or(c.total_events);
        c.detector_count = detectors.unwrap_or(c.detector_count);
        c.gamma = gamma.unwrap_or(c.gamma);
        c.replicas = replicas.unwrap_or(c.replicas);
        c.validate().map_err(to_py)?;
        Ok(Self(c))
    }

    #[getter]
    fn experiment(&self) -> &'static str {
        ExperimentKind::of(&self.0).name()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    /// Events per replica.
    #[getter]
    fn events(&self) -> u64 {
        self.0.total_events
    }

    #[getter]
    fn detectors(&self) -> usize {
        self.0.detector_count
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }

    #[getter]
    fn replicas(&self) -> u32 {
        self.0.replicas
    }

    #[getter]
    fn digest(&self) -> String {
        self.0.digest()
    }

    fn __repr__(&self) -> String {
        format!(
            "Config({}, events={}, seed={}, replicas={})",
            self.experiment(),
            self.0.total_events,
            self.0.seed,
            self.0.replicas
        )
    }
}

/// Per-detector counts of a run.
#[pyclass(name = "Profile", module = "eventoptics", frozen)]
struct PyProfile(CountsProfile);

#[pymethods]
impl PyProfile {
    /// Detector centres: angles on a semicircle, lengths on a plane.
    #[getter]
    fn coordinates(&self) -> Vec<f64> {
        self.0.coordinates()
    }

    #[getter]
    fn received(&self) -> Vec<u64> {
        self.0.received()
    }

    #[getter]
    fn fired(&self) -> Vec<u64> {
        self.0.fired()
    }

    #[getter]
    fn theory(&self) -> Option<Vec<f64>> {
        self.0.theory.clone()
    }

    #[getter]
    fn off_screen(&self) -> u64 {
        self.0.off_screen
    }

    #[getter]
    fn absorbed(&self) -> u64 {
        self.0.absorbed
    }

    #[getter]
    fn total_events(&self) -> u64 {
        self.0.total_events
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    fn write_csv(&self, path: std::path::PathBuf) -> PyResult<()> {
        self.0.write_csv(&path).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.0.rows.len()
    }
}

#[pyclass(name = "FitReport", module = "eventoptics", frozen, get_all)]
struct PyFitReport {
    scale: f64,
    normalized_rmse: f64,
    fringe_period_sim: Option<f64>,
    fringe_period_theory: Option<f64>,
}

impl From<FitReport> for PyFitReport {
    fn from(r: FitReport) -> Self {
        Self {
            scale: r.scale,
            normalized_rmse: r.normalized_rmse,
            fringe_period_sim: r.fringe_period_sim,
            fringe_period_theory: r.fringe_period_theory,
        }
    }
}

#[pymethods]
impl PyFitReport {
    fn __repr__(&self) -> String {
        format!(
            "FitReport(scale={}, normalized_rmse={}, fringe_period_sim={:?}, fringe_period_theory={:?})",
            self.scale, self.normalized_rmse, self.fringe_period_sim, self.fringe_period_theory
        )
    }
}

/// One adaptive threshold detector fed by hand.
#[pyclass(name = "Detector", module = "eventoptics")]
struct PyDetector(DetectorState);

#[pymethods]
impl PyDetector {
    #[new]
    fn new(gamma: f64) -> PyResult<Self> {
        DetectorState::new(gamma, Window { lo: 0.0, hi: 1.0 })
            .map(Self)
            .map_err(to_py)
    }

    /// Absorbs a message of the given phase.
    fn update(&mut self, phase: f64) -> PyResult<()> {
        self.0.update(Vec2::from_angle(phase)).map_err(to_py)
    }

    /// Clicks iff |p|² exceeds the threshold `r` in [0, 1).
    fn fire(&mut self, r: f64) -> PyResult<bool> {
        self.0.fire(r).map_err(to_py)
    }

    #[getter]
    fn p(&self) -> (f64, f64) {
        let p = self.0.p();
        (p.x, p.y)
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }
}

/// Runs all replicas and returns the merged counts.
#[pyfunction]
fn run(py: Python<'_>, config: &PyConfig) -> PyResult<PyProfile> {
    let c = config.0;
    py.detach(|| eventoptics::run(&c)).map(PyProfile).map_err(to_py)
}

#[pyfunction]
fn run_replica(py: Python<'_>, config: &PyConfig, replica: u32) -> PyResult<PyProfile> {
    let c = config.0;
    py.detach(|| eventoptics::run_replica(&c, replica))
        .map(PyProfile)
        .map_err(to_py)
}

/// Profile with theory columns filled, and the fit against it.
#[pyfunction]
fn analyze(py: Python<'_>, config: &PyConfig, profile: &PyProfile) -> PyResult<(PyProfile, PyFitReport)> {
    let c = config.0;
    let a = py
        .detach(|| eventoptics::analyze(&c, &profile.0))
        .map_err(to_py)?;
    Ok((PyProfile(a.profile), a.report.into()))
}

#[pyfunction]
fn replica_merge(profiles: Vec<PyRef<'_, PyProfile>>) -> PyResult<PyProfile> {
    let parts: Vec<CountsProfile> = profiles.iter().map(|p| p.0.clone()).collect();
    eventoptics::replica_merge(&parts).map(PyProfile).map_err(to_py)
}

#[pyfunction]
fn double_slit_intensity(theta: f64, slit_width: f64, separation: f64, wavelength: f64) -> f64 {
    wave::double_slit_intensity(theta, slit_width, separation, wavelength)
}

#[pyfunction]
fn gaussian_twin_intensity(y: f64, separation: f64, sigma: f64, distance: f64, wavelength: f64) -> f64 {
    wave::gaussian_twin_intensity(y, separation, sigma, distance, wavelength)
}

/// Metres from a length with a unit, e.g. "670nm".
#[pyfunction(name = "parse_length")]
fn py_parse_length(text: &str) -> PyResult<f64> {
    parse_length(text).map_err(to_py)
}

#[pyfunction(name = "format_length")]
fn py_format_length(meters: f64) -> String {
    format_length(meters)
}

#[pymodule(name = "eventoptics")]
pub fn eventoptics_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_class::<PyProfile>()?;
    m.add_class::<PyFitReport>()?;
    m.add_class::<PyDetector>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(run_replica, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(replica_merge, m)?)?;
    m.add_function(wrap_pyfunction!(double_slit_intensity, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_twin_intensity, m)?)?;
    m.add_function(wrap_pyfunction!(py_parse_length, m)?)?;
    m.add_function(wrap_pyfunction!(py_format_length, m)?)?;
    Ok(())
}
