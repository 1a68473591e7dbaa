use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use naev_core::harness::{convergence_study, run_simulation, RunConfig};
use naev_core::{
    EnergyRecord, Error, Field2D, Grid2D, InitPolicy, ModelKind, ModelParams, ModelSpec,
    SchemeKind, SchemeState,
};

create_exception!(naev, ClampAbortError, PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::ClampAbort { .. } => ClampAbortError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "Grid", module = "naev", frozen)]
struct PyGrid(Arc<Grid2D>);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> PyResult<Self> {
        Grid2D::new(nx, ny, lx, ly).map(PyGrid).map_err(to_py)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.nx(), self.0.ny())
    }

    #[getter]
    fn lengths(&self) -> (f64, f64) {
        (self.0.lx(), self.0.ly())
    }

    #[getter]
    fn spacing(&self) -> (f64, f64) {
        (self.0.hx(), self.0.hy())
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(nx={}, ny={}, lx={}, ly={})",
            self.0.nx(),
            self.0.ny(),
            self.0.lx(),
            self.0.ly()
        )
    }
}

/// A grid function stored row-major as `values[i * ny + j]`.
#[pyclass(name = "Field", module = "naev", frozen)]
struct PyField(Field2D);

#[pymethods]
impl PyField {
    #[new]
    fn new(grid: &PyGrid, values: Vec<f64>) -> PyResult<Self> {
        Field2D::new(grid.0.clone(), values).map(PyField).map_err(to_py)
    }

    #[staticmethod]
    fn constant(grid: &PyGrid, value: f64) -> Self {
        PyField(Field2D::constant(grid.0.clone(), value))
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(self.0.grid().clone())
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    fn integral(&self) -> f64 {
        self.0.integral()
    }

    fn mean(&self) -> f64 {
        self.0.mean()
    }

    fn norm_l2(&self) -> f64 {
        self.0.norm_l2()
    }

    fn inner_product(&self, other: &PyField) -> PyResult<f64> {
        if self.0.grid() != other.0.grid() {
            return Err(PyValueError::new_err("fields live on different grids"));
        }
        Ok(self.0.inner_product(&other.0))
    }

    fn laplacian(&self) -> PyField {
        PyField(self.0.laplacian())
    }

    fn __len__(&self) -> usize {
        self.0.values().len()
    }
}

#[pyclass(name = "Model", module = "naev", frozen)]
struct PyModel(Arc<ModelSpec>);

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (kind, grid, epsilon, g = 0.0))]
    fn new(kind: &str, grid: &PyGrid, epsilon: f64, g: f64) -> PyResult<Self> {
        let kind: ModelKind = kind.parse().map_err(to_py)?;
        ModelSpec::new(kind, ModelParams { epsilon, g }, grid.0.clone())
            .map(|m| PyModel(Arc::new(m)))
            .map_err(to_py)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind().name()
    }

    fn energy(&self, phi: &PyField) -> f64 {
        self.0.total_energy(&phi.0)
    }

    fn e1(&self, phi: &PyField) -> f64 {
        self.0.e1_of(&phi.0)
    }

    fn apply_l(&self, phi: &PyField) -> PyField {
        PyField(self.0.apply_l(&phi.0))
    }

    fn apply_g(&self, phi: &PyField) -> PyField {
        PyField(self.0.apply_g(&phi.0))
    }
}

fn record_dict<'py>(py: Python<'py>, rec: &EnergyRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n", rec.n)?;
    d.set_item("t", rec.t)?;
    d.set_item("E_original", rec.e_original)?;
    d.set_item("E_modified", rec.e_modified)?;
    d.set_item("r", rec.r)?;
    d.set_item("E1", rec.e1)?;
    d.set_item("radicand", rec.radicand)?;
    d.set_item("dissipation", rec.dissipation)?;
    d.set_item("clamped", rec.clamped)?;
    d.set_item("sav_form_energy", rec.sav_form_energy)?;
    Ok(d)
}

/// Time stepper. `shift` is `C` for `sav_cn` and `kappa` otherwise.
#[pyclass(name = "Scheme", module = "naev")]
struct PyScheme(SchemeState);

#[pymethods]
impl PyScheme {
    #[new]
    #[pyo3(signature = (model, phi0, dt, scheme = "naev_cn", shift = 0.0, clamp_initial = false))]
    fn new(
        model: &PyModel,
        phi0: &PyField,
        dt: f64,
        scheme: &str,
        shift: f64,
        clamp_initial: bool,
    ) -> PyResult<Self> {
        if phi0.0.grid() != model.0.grid() {
            return Err(PyValueError::new_err("field and model use different grids"));
        }
        let kind = SchemeKind::from_tag(scheme, shift).map_err(to_py)?;
        let policy = if clamp_initial {
            InitPolicy::Clamp
        } else {
            InitPolicy::Strict
        };
        SchemeState::with_policy(model.0.clone(), phi0.0.clone(), dt, kind, policy)
            .map(PyScheme)
            .map_err(to_py)
    }

    /// Advances `count` steps and returns the diagnostics of the last one.
    #[pyo3(signature = (count = 1))]
    fn step<'py>(&mut self, py: Python<'py>, count: usize) -> PyResult<Bound<'py, PyDict>> {
        let mut last = None;
        for _ in 0..count {
            last = Some(self.0.step().map_err(to_py)?);
        }
        let d = PyDict::new(py);
        if let Some(diag) = last {
            d.set_item("radicand", diag.radicand)?;
            d.set_item("clamped", diag.radicand_clamped)?;
            d.set_item("dissipation", diag.dissipation)?;
            d.set_item("modified_energy", diag.modified_energy)?;
            d.set_item("denominator", diag.denominator)?;
        }
        Ok(d)
    }

    #[getter]
    fn phi(&self) -> PyField {
        PyField(self.0.phi().clone())
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.r()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn time(&self) -> f64 {
        self.0.time()
    }

    #[getter]
    fn scheme(&self) -> &'static str {
        self.0.kind().tag()
    }

    fn modified_energy(&self) -> f64 {
        self.0.modified_energy()
    }

    fn energy_report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        record_dict(py, &self.0.energy_report())
    }
}

fn load_config(preset: Option<&str>, config: Option<&str>) -> PyResult<RunConfig> {
    let base = match preset {
        Some(name) => RunConfig::preset(name).map_err(to_py)?,
        None => RunConfig::default(),
    };
    let cfg = match config {
        Some(text) => base.with_toml_overrides(text).map_err(to_py)?,
        None => base,
    };
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

/// Runs a configured simulation. `config` is TOML text applied over the preset.
#[pyfunction]
#[pyo3(signature = (preset = None, config = None))]
fn run<'py>(
    py: Python<'py>,
    preset: Option<&str>,
    config: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = load_config(preset, config)?;
    let out = py.detach(|| run_simulation(&cfg)).map_err(to_py)?;
    let d = PyDict::new(py);
    let log = out
        .log
        .iter()
        .map(|r| record_dict(py, r))
        .collect::<PyResult<Vec<_>>>()?;
    d.set_item("log", log)?;
    d.set_item("phi", PyField(out.state.phi().clone()))?;
    d.set_item("clamp_count", out.clamp_count)?;
    d.set_item("min_e1", out.min_e1)?;
    d.set_item(
        "snapshots",
        out.snapshots
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>(),
    )?;
    Ok(d)
}

/// Convergence table as a list of `(dt, err, rate)` with `rate = None` when undefined.
#[pyfunction]
#[pyo3(signature = (dts, preset = None, config = None))]
fn converge(
    py: Python<'_>,
    dts: Vec<f64>,
    preset: Option<&str>,
    config: Option<&str>,
) -> PyResult<Vec<(f64, f64, Option<f64>)>> {
    let cfg = load_config(preset, config)?;
    let table = py.detach(|| convergence_study(&cfg, &dts)).map_err(to_py)?;
    Ok(table.rows.iter().map(|r| (r.dt, r.err, r.rate)).collect())
}

/// Initial field of a configuration.
#[pyfunction]
#[pyo3(signature = (preset = None, config = None))]
fn initial_field(preset: Option<&str>, config: Option<&str>) -> PyResult<PyField> {
    let cfg = load_config(preset, config)?;
    let (_, phi) = cfg.build().map_err(to_py)?;
    Ok(PyField(phi))
}

#[pymodule]
fn naev(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyScheme>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(converge, m)?)?;
    m.add_function(wrap_pyfunction!(initial_field, m)?)?;
    m.add("ClampAbortError", m.py().get_type::<ClampAbortError>())?;
    m.add("PRESETS", naev_core::harness::PRESETS.to_vec())?;
    Ok(())
}
