use follow_core::config::{load_suite, ConfigFile};
use follow_core::harness::{
    check_trends, compute_metrics, register_participant, run_suite as core_run_suite, run_trial_with, SimConfig,
    SummaryRow, TickLog, TrialMetrics, TrialOptions, VariantConfig, PRESET_NAMES,
};
use follow_core::reid::{self, FeatureBank};
use follow_core::sensing::{self, BoundingBox, Embedding};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};
use std::path::PathBuf;

fn value_err(e: follow_core::Error) -> PyErr {
    match e {
        follow_core::Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// A scenario plus pipeline parameters, loaded from TOML.
#[pyclass(name = "SimConfig", module = "follow_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySimConfig {
    inner: SimConfig,
    seed: u64,
    variants: Vec<VariantConfig>,
    seeds: Vec<u64>,
}

impl PySimConfig {
    fn from_file(file: ConfigFile) -> PyResult<Self> {
        Ok(Self {
            inner: file.sim_config().map_err(value_err)?,
            seed: file.seed,
            variants: file.variants().map_err(value_err)?,
            seeds: file.seeds(),
        })
    }
}

#[pymethods]
impl PySimConfig {
    /// The built-in office scenario.
    #[new]
    fn new() -> PyResult<Self> {
        Self::from_file(ConfigFile::default())
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Self::from_file(ConfigFile::from_toml_str(text).map_err(value_err)?)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Self::from_file(ConfigFile::load(&path).map_err(value_err)?)
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.scenario.name
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.seed
    }

    #[getter]
    fn seeds(&self) -> Vec<u64> {
        self.seeds.clone()
    }

    #[getter]
    fn variants(&self) -> Vec<String> {
        self.variants.iter().map(|v| v.name.clone()).collect()
    }

    #[getter]
    fn max_duration(&self) -> f64 {
        self.inner.scenario.max_duration
    }

    /// Copy with a different trial time limit, seconds.
    fn with_max_duration(&self, seconds: f64) -> PyResult<Self> {
        let mut c = self.clone();
        c.inner.scenario.max_duration = seconds;
        c.inner.validate().map_err(value_err)?;
        Ok(c)
    }

    fn __repr__(&self) -> String {
        format!("SimConfig(name={:?}, seed={}, max_duration={})", self.inner.scenario.name, self.seed, self.max_duration())
    }
}

/// A registered target: torso and face embeddings and their means.
#[pyclass(name = "FeatureBank", module = "follow_py", frozen)]
struct PyFeatureBank {
    inner: FeatureBank,
}

#[pymethods]
impl PyFeatureBank {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: FeatureBank::load(&path).map_err(value_err)? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(value_err)
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode().as_str()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn torso_count(&self) -> usize {
        self.inner.torso_bank().len()
    }

    #[getter]
    fn face_count(&self) -> usize {
        self.inner.face_bank().len()
    }

    fn torso_mean(&self) -> Vec<f64> {
        self.inner.torso_mean().values().to_vec()
    }

    fn face_mean(&self) -> Option<Vec<f64>> {
        self.inner.face_mean().map(|m| m.values().to_vec())
    }

    fn __repr__(&self) -> String {
        format!("FeatureBank(mode={:?}, torso={}, face={})", self.mode(), self.torso_count(), self.face_count())
    }
}

fn metrics_dict<'py>(py: Python<'py>, m: &TrialMetrics) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("avg_speed", m.avg_speed)?;
    d.set_item("avg_follow_distance", m.avg_follow_distance)?;
    d.set_item("avg_obstacle_distance", m.avg_obstacle_distance)?;
    d.set_item("lost_target", m.lost_target)?;
    d.set_item("wrong_person_events", m.wrong_person_events)?;
    d.set_item("follow_ticks", m.follow_ticks)?;
    d.set_item("collisions", m.collisions)?;
    d.set_item("reid_calls", m.reid_calls)?;
    d.set_item("perception_updates", m.perception_updates)?;
    d.set_item("duration", m.duration)?;
    Ok(d)
}

fn row_dict<'py>(py: Python<'py>, r: &SummaryRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("variant", &r.variant)?;
    d.set_item("label", &r.label)?;
    d.set_item("trials", r.trials)?;
    d.set_item("avg_speed", r.avg_speed)?;
    d.set_item("avg_follow_distance", r.avg_follow_distance)?;
    d.set_item("avg_obstacle_distance", r.avg_obstacle_distance)?;
    d.set_item("lost", r.lost)?;
    d.set_item("wrong_person", r.wrong_person)?;
    Ok(d)
}

/// Outcome of one closed-loop trial.
#[pyclass(name = "Trial", module = "follow_py", frozen)]
struct PyTrial {
    #[pyo3(get)]
    variant: String,
    #[pyo3(get)]
    seed: u64,
    #[pyo3(get)]
    participant: usize,
    metrics: TrialMetrics,
    log: TickLog,
}

#[pymethods]
impl PyTrial {
    #[getter]
    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        metrics_dict(py, &self.metrics)
    }

    #[getter]
    fn ticks(&self) -> usize {
        self.log.ticks.len()
    }

    /// The tick log as JSON lines.
    fn log_jsonl<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.log.to_jsonl())
    }

    fn __repr__(&self) -> String {
        format!("Trial(variant={:?}, seed={}, ticks={})", self.variant, self.seed, self.log.ticks.len())
    }
}

fn to_box(b: (f64, f64, f64, f64)) -> BoundingBox {
    BoundingBox::new(b.0, b.1, b.2, b.3)
}

/// IoU of two `(center_u, center_v, width, height)` boxes.
#[pyfunction]
fn iou(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> f64 {
    sensing::iou(&to_box(a), &to_box(b))
}

/// Cosine of two unit vectors.
#[pyfunction]
fn cosine_similarity(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    let a = Embedding::from_unit(a).map_err(value_err)?;
    let b = Embedding::from_unit(b).map_err(value_err)?;
    reid::cosine_similarity(&a, &b).map_err(value_err)
}

/// Normalized mean of unit vectors.
#[pyfunction]
fn bank_mean(vectors: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    let es = vectors.into_iter().map(Embedding::from_unit).collect::<Result<Vec<_>, _>>().map_err(value_err)?;
    Ok(reid::bank_mean(&es).map_err(value_err)?.values().to_vec())
}

#[pyfunction]
fn variant_names() -> Vec<&'static str> {
    PRESET_NAMES.to_vec()
}

/// Registers the participant of `seed` (the config seed by default).
#[pyfunction]
#[pyo3(signature = (config, seed=None))]
fn register(py: Python<'_>, config: &PySimConfig, seed: Option<u64>) -> PyResult<PyFeatureBank> {
    let seed = seed.unwrap_or(config.seed);
    let inner = py.detach(|| register_participant(&config.inner, seed)).map_err(value_err)?;
    Ok(PyFeatureBank { inner })
}

#[pyfunction]
#[pyo3(signature = (config, variant="ours", seed=None, bank=None))]
fn run_trial(
    py: Python<'_>,
    config: &PySimConfig,
    variant: &str,
    seed: Option<u64>,
    bank: Option<&PyFeatureBank>,
) -> PyResult<PyTrial> {
    let v = VariantConfig::preset(variant).map_err(value_err)?;
    let seed = seed.unwrap_or(config.seed);
    let options = TrialOptions { bank: bank.map(|b| b.inner.clone()), record_trajectory: false };
    let t = py.detach(|| run_trial_with(&config.inner, &v, seed, options)).map_err(value_err)?;
    Ok(PyTrial { variant: t.result.variant, seed, participant: t.result.participant, metrics: t.result.metrics, log: t.log })
}

/// Recomputes metrics from a JSON-lines tick log.
#[pyfunction]
fn replay<'py>(py: Python<'py>, log: &[u8]) -> PyResult<Bound<'py, PyDict>> {
    let log = TickLog::read_jsonl(log).map_err(value_err)?;
    metrics_dict(py, &compute_metrics(&log).map_err(value_err)?)
}

/// Runs a suite and returns `(rows, trends)`: one dict per variant and one
/// `(name, passed, detail)` tuple per trend check.
#[pyfunction]
#[pyo3(signature = (config, variants=None, seeds=None))]
fn run_suite<'py>(
    py: Python<'py>,
    config: &PySimConfig,
    variants: Option<Vec<String>>,
    seeds: Option<Vec<u64>>,
) -> PyResult<(Vec<Bound<'py, PyDict>>, Vec<(String, bool, String)>)> {
    let variants = match variants {
        Some(names) => names.iter().map(|n| VariantConfig::preset(n)).collect::<Result<Vec<_>, _>>().map_err(value_err)?,
        None => config.variants.clone(),
    };
    let seeds = seeds.unwrap_or_else(|| config.seeds.clone());
    let outcome = py.detach(|| core_run_suite(std::slice::from_ref(&config.inner), &variants, &seeds));
    if let Some(f) = outcome.failures.first() {
        return Err(PyValueError::new_err(format!("{} seed {}: {}", f.variant, f.seed, f.error)));
    }
    let rows = outcome.summary.iter().map(|r| row_dict(py, r)).collect::<PyResult<Vec<_>>>()?;
    let trends = check_trends(&outcome.summary).into_iter().map(|c| (c.name, c.passed, c.detail)).collect();
    Ok((rows, trends))
}

/// Loads a suite file and returns the scenario configs it names.
#[pyfunction]
fn load_suite_scenarios(path: PathBuf) -> PyResult<Vec<String>> {
    let plan = load_suite(&path).map_err(value_err)?;
    Ok(plan.scenarios.iter().map(|s| s.scenario.name.clone()).collect())
}

#[pymodule]
fn follow_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySimConfig>()?;
    m.add_class::<PyFeatureBank>()?;
    m.add_class::<PyTrial>()?;
    m.add_function(wrap_pyfunction!(iou, m)?)?;
    m.add_function(wrap_pyfunction!(cosine_similarity, m)?)?;
    m.add_function(wrap_pyfunction!(bank_mean, m)?)?;
    m.add_function(wrap_pyfunction!(variant_names, m)?)?;
    m.add_function(wrap_pyfunction!(register, m)?)?;
    m.add_function(wrap_pyfunction!(run_trial, m)?)?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(load_suite_scenarios, m)?)?;
    Ok(())
}
