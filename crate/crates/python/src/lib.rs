//! Python bindings for the `ssrlsc` toolkit.
//!
//! Matrices cross the boundary as lists of rows; cubes as flat
//! row-major `(row, col, band)` lists.

use std::collections::BTreeMap;

use ndarray::Array2;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use ssrlsc::classify::{self, ConfusionMatrix};
use ssrlsc::datamodel::{self, ByteOrder, Dtype, HyperCube, Interleave, LabelGrid};
use ssrlsc::eig::{self, Projection};
use ssrlsc::filter::{self, FilterParams};
use ssrlsc::pipeline::{self, ClassifierKind, ExperimentConfig, Method, RunReport};
use ssrlsc::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(PyValueError::new_err)
}

fn to_array(rows: Vec<Vec<f64>>) -> PyResult<Array2<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("matrix rows must all have the same length"));
    }
    Array2::from_shape_vec((n, m), rows.into_iter().flatten().collect())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

fn to_rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

#[pyclass(name = "HyperCube", module = "ssrlsc_py", skip_from_py_object)]
#[derive(Clone)]
struct PyCube(HyperCube);

#[pymethods]
impl PyCube {
    #[new]
    fn new(height: usize, width: usize, bands: usize, values: Vec<f64>) -> PyResult<Self> {
        HyperCube::new(height, width, bands, values).map(PyCube).map_err(py_err)
    }

    #[staticmethod]
    fn load(header: &str) -> PyResult<Self> {
        datamodel::load_cube(header).map(PyCube).map_err(py_err)
    }

    #[pyo3(signature = (header, dtype = "f64", byte_order = "little", interleave = "bsq"))]
    fn save(&self, header: &str, dtype: &str, byte_order: &str, interleave: &str) -> PyResult<()> {
        let dtype: Dtype = parse(dtype)?;
        let order: ByteOrder = parse(byte_order)?;
        let interleave: Interleave = parse(interleave)?;
        datamodel::write_cube(&self.0, header, dtype, order, interleave).map_err(py_err)
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.height()
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn bands(&self) -> usize {
        self.0.bands()
    }

    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    fn pixel(&self, row: usize, col: usize) -> PyResult<Vec<f64>> {
        if row >= self.0.height() || col >= self.0.width() {
            return Err(PyValueError::new_err(format!("pixel ({row}, {col}) out of range")));
        }
        Ok(self.0.pixel(row, col).to_vec())
    }

    fn __repr__(&self) -> String {
        format!("HyperCube({}x{}x{})", self.0.height(), self.0.width(), self.0.bands())
    }
}

#[pyclass(name = "LabelGrid", module = "ssrlsc_py", skip_from_py_object)]
#[derive(Clone)]
struct PyLabels(LabelGrid);

#[pymethods]
impl PyLabels {
    #[new]
    fn new(height: usize, width: usize, labels: Vec<usize>) -> PyResult<Self> {
        LabelGrid::new(height, width, labels).map(PyLabels).map_err(py_err)
    }

    #[staticmethod]
    fn load(path: &str, height: usize, width: usize) -> PyResult<Self> {
        datamodel::load_labels(path, height, width).map(PyLabels).map_err(py_err)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        datamodel::write_labels(&self.0, path).map_err(py_err)
    }

    #[getter]
    fn classes(&self) -> usize {
        self.0.classes()
    }

    fn labels(&self) -> Vec<usize> {
        self.0.labels().to_vec()
    }

    fn class_counts(&self) -> Vec<usize> {
        self.0.class_counts()
    }

    fn __repr__(&self) -> String {
        format!("LabelGrid({}x{}, classes={})", self.0.height(), self.0.width(), self.0.classes())
    }
}

#[pyclass(name = "Projection", module = "ssrlsc_py", skip_from_py_object)]
#[derive(Clone)]
struct PyProjection(Projection);

#[pymethods]
impl PyProjection {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Projection::load(path).map(PyProjection).map_err(py_err)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.0.save(path).map_err(py_err)
    }

    /// D×d basis as a list of D rows.
    #[getter]
    fn basis(&self) -> Vec<Vec<f64>> {
        to_rows(&self.0.basis)
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.0.eigenvalues.to_vec()
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.0.tau
    }

    #[getter]
    fn jitter(&self) -> f64 {
        self.0.jitter
    }

    fn truncate(&self, d: usize) -> PyResult<Self> {
        self.0.truncate(d).map(PyProjection).map_err(py_err)
    }

    /// Projects each row `x` to `Vᵀx`.
    fn apply(&self, rows: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let z = self.0.apply(&to_array(rows)?).map_err(py_err)?;
        Ok(to_rows(&z))
    }

    fn __repr__(&self) -> String {
        format!("Projection({} -> {})", self.0.input_dim(), self.0.output_dim())
    }
}

/// Experiment settings; starts from the defaults for `method` and `bands`.
#[pyclass(name = "ExperimentConfig", module = "ssrlsc_py", skip_from_py_object)]
#[derive(Clone)]
struct PyConfig(ExperimentConfig);

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (method = "ssrlsc", bands = 16))]
    fn new(method: &str, bands: usize) -> PyResult<Self> {
        let method: Method = parse(method)?;
        Ok(PyConfig(ExperimentConfig::for_method(method, bands)))
    }

    #[getter]
    fn method(&self) -> String {
        self.0.method.to_string()
    }

    #[setter]
    fn set_method(&mut self, method: &str) -> PyResult<()> {
        self.0.method = parse(method)?;
        Ok(())
    }

    #[getter]
    fn use_filter(&self) -> bool {
        self.0.use_filter
    }

    #[setter]
    fn set_use_filter(&mut self, v: bool) {
        self.0.use_filter = v;
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.reg.alpha
    }

    #[setter]
    fn set_alpha(&mut self, v: f64) {
        self.0.reg.alpha = v;
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.reg.beta
    }

    #[setter]
    fn set_beta(&mut self, v: f64) {
        self.0.reg.beta = v;
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.reg.gamma
    }

    #[setter]
    fn set_gamma(&mut self, v: f64) {
        self.0.reg.gamma = v;
    }

    #[getter]
    fn k_w(&self) -> usize {
        self.0.k_w
    }

    #[setter]
    fn set_k_w(&mut self, v: usize) {
        self.0.k_w = v;
    }

    #[getter]
    fn k_b(&self) -> usize {
        self.0.k_b
    }

    #[setter]
    fn set_k_b(&mut self, v: usize) {
        self.0.k_b = v;
    }

    #[getter]
    fn window(&self) -> usize {
        self.0.patch.window
    }

    #[setter]
    fn set_window(&mut self, v: usize) {
        self.0.patch.window = v;
    }

    #[getter]
    fn filter_radius(&self) -> usize {
        self.0.filter.radius
    }

    #[setter]
    fn set_filter_radius(&mut self, v: usize) {
        self.0.filter.radius = v;
    }

    #[getter]
    fn filter_eps(&self) -> f64 {
        self.0.filter.epsilon
    }

    #[setter]
    fn set_filter_eps(&mut self, v: f64) {
        self.0.filter.epsilon = v;
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.0.dims.clone()
    }

    #[setter]
    fn set_dims(&mut self, v: Vec<usize>) {
        self.0.dims = v;
    }

    #[getter]
    fn train_per_class(&self) -> usize {
        self.0.split.per_class_train
    }

    #[setter]
    fn set_train_per_class(&mut self, v: usize) {
        self.0.split.per_class_train = v;
    }

    #[getter]
    fn runs(&self) -> usize {
        self.0.split.runs
    }

    #[setter]
    fn set_runs(&mut self, v: usize) {
        self.0.split.runs = v;
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.split.seed
    }

    #[setter]
    fn set_seed(&mut self, v: u64) {
        self.0.split.seed = v;
    }

    #[getter]
    fn classifier(&self) -> &'static str {
        match self.0.classifier {
            ClassifierKind::Svm => "svm",
            ClassifierKind::OneNn => "1nn",
        }
    }

    #[setter]
    fn set_classifier(&mut self, v: &str) -> PyResult<()> {
        self.0.classifier = parse(v)?;
        Ok(())
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "RunReport", module = "ssrlsc_py")]
struct PyReport(RunReport);

#[pymethods]
impl PyReport {
    /// One `(run, dim, oa, aa, kappa, seconds)` tuple per row.
    #[getter]
    fn rows(&self) -> Vec<(usize, usize, f64, f64, f64, f64)> {
        self.0
            .rows
            .iter()
            .map(|r| (r.run, r.dim, r.metrics.oa, r.metrics.aa, r.metrics.kappa, r.seconds))
            .collect()
    }

    fn dims(&self) -> Vec<usize> {
        self.0.dims()
    }

    /// Mean `(oa, aa, kappa)` over runs at `dim`.
    fn mean(&self, dim: usize) -> Option<(f64, f64, f64)> {
        self.0.mean(dim).map(|m| (m.oa, m.aa, m.kappa))
    }

    /// `(dim, oa, aa, kappa)` of the dimension with the highest mean OA.
    fn best(&self) -> Option<(usize, f64, f64, f64)> {
        self.0.best().map(|m| (m.dim, m.oa, m.aa, m.kappa))
    }

    #[getter]
    fn stage_seconds(&self) -> BTreeMap<String, f64> {
        self.0.stage_seconds.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[getter]
    fn tau(&self) -> Vec<f64> {
        self.0.tau.clone()
    }

    #[getter]
    fn projection(&self) -> Option<PyProjection> {
        self.0.projection.clone().map(PyProjection)
    }

    #[pyo3(signature = (timing = true))]
    fn to_csv(&self, timing: bool) -> PyResult<String> {
        let mut buf = Vec::new();
        pipeline::write_report_csv(&mut buf, "none", &self.0, timing)
            .map_err(|e| PyIOError::new_err(e.to_string()))?;
        String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

#[pyfunction]
#[pyo3(signature = (classes = 3, blocks_per_class = 2, block_size = 8, bands = 16, class_sep = 6.0, noise_sd = 0.5, seed = 0))]
fn make_synthetic(
    classes: usize,
    blocks_per_class: usize,
    block_size: usize,
    bands: usize,
    class_sep: f64,
    noise_sd: f64,
    seed: u64,
) -> PyResult<(PyCube, PyLabels)> {
    let (cube, grid) =
        datamodel::make_synthetic(classes, blocks_per_class, block_size, bands, class_sep, noise_sd, seed)
            .map_err(py_err)?;
    Ok((PyCube(cube), PyLabels(grid)))
}

#[pyfunction]
#[pyo3(signature = (cube, radius = 1, epsilon = 0.01))]
fn filter_cube(py: Python<'_>, cube: PyRef<'_, PyCube>, radius: usize, epsilon: f64) -> PyResult<PyCube> {
    let params = FilterParams { radius, epsilon };
    let cube = cube.0.clone();
    py.detach(|| filter::filter_cube(&cube, &params))
        .map(PyCube)
        .map_err(py_err)
}

/// Standardized first-principal-component guidance image as rows.
#[pyfunction]
fn pca_guidance(cube: PyRef<'_, PyCube>) -> PyResult<Vec<Vec<f64>>> {
    let g = filter::pca_guidance(&cube.0)
        .and_then(|g| g.standardized())
        .map_err(py_err)?;
    Ok(to_rows(&g.values))
}

/// Eigenvalues (descending) and eigenvectors (as columns of the returned rows).
#[pyfunction]
fn sym_eig(m: Vec<Vec<f64>>) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let (vals, vecs) = eig::sym_eig(&to_array(m)?).map_err(py_err)?;
    Ok((vals.to_vec(), to_rows(&vecs)))
}

/// Top-`d` generalized eigenvectors of `A v = λ B v`.
#[pyfunction]
fn solve_pencil(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, d: usize) -> PyResult<PyProjection> {
    eig::solve_pencil(&to_array(a)?, &to_array(b)?, d)
        .map(PyProjection)
        .map_err(py_err)
}

/// `(oa, aa, kappa)` of a confusion matrix given as rows (true class) of counts.
#[pyfunction]
fn metrics(counts: Vec<Vec<u64>>) -> PyResult<(f64, f64, f64)> {
    let n = counts.len();
    if counts.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("confusion matrix must be square"));
    }
    let counts = Array2::from_shape_vec((n, n), counts.into_iter().flatten().collect())
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let cm = ConfusionMatrix::new(counts).map_err(py_err)?;
    let m = classify::metrics(&cm).map_err(py_err)?;
    Ok((m.oa, m.aa, m.kappa))
}

#[pyfunction]
fn run_experiment(
    py: Python<'_>,
    cube: PyRef<'_, PyCube>,
    grid: PyRef<'_, PyLabels>,
    config: PyRef<'_, PyConfig>,
) -> PyResult<PyReport> {
    let (cube, grid, cfg) = (cube.0.clone(), grid.0.clone(), config.0.clone());
    py.detach(|| pipeline::run_experiment(&cube, &grid, &cfg))
        .map(PyReport)
        .map_err(py_err)
}

#[pymodule]
fn ssrlsc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCube>()?;
    m.add_class::<PyLabels>()?;
    m.add_class::<PyProjection>()?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(make_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(filter_cube, m)?)?;
    m.add_function(wrap_pyfunction!(pca_guidance, m)?)?;
    m.add_function(wrap_pyfunction!(sym_eig, m)?)?;
    m.add_function(wrap_pyfunction!(solve_pencil, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
