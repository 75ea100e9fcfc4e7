//! Python bindings for `rogue_rc`.
//!
//! Fields cross the boundary as lists of complex numbers; enums as strings.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyIndexError, PyValueError};
use pyo3::prelude::*;

use rogue_rc::analytic;
use rogue_rc::cli::dataset;
use rogue_rc::esn::{self, EsnHyperParams, NoiseScale, Partition, ReadoutMode};
use rogue_rc::forecast::{self, ForecastMode, ForecastOptions};
use rogue_rc::lyapunov;
use rogue_rc::nls::{self, ComplexField, Method, SimulationConfig};
use rogue_rc::ocean::{self, SeaStateParams};

fn to_py(err: rogue_rc::Error) -> PyErr {
    match err {
        rogue_rc::Error::Io { .. } => PyIOError::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(name = "Grid", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyGrid(nls::Grid);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(n: usize, length: f64) -> PyResult<Self> {
        nls::Grid::new(n, length).map(Self).map_err(to_py)
    }

    /// Grid holding `periods` wavelengths of the modulation `omega`.
    #[staticmethod]
    #[pyo3(signature = (n, omega, periods=1))]
    fn for_modulation(n: usize, omega: f64, periods: usize) -> PyResult<Self> {
        nls::Grid::for_modulation(n, omega, periods).map(Self).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.0.length()
    }

    fn nodes(&self) -> Vec<f64> {
        self.0.nodes()
    }

    fn wavenumbers(&self) -> Vec<f64> {
        self.0.wavenumbers()
    }

    fn __repr__(&self) -> String {
        format!("Grid(n={}, length={})", self.0.len(), self.0.length())
    }
}

#[pyclass(name = "Field", from_py_object)]
#[derive(Clone)]
struct PyField(ComplexField);

#[pymethods]
impl PyField {
    #[new]
    fn new(grid: PyGrid, values: Vec<Complex64>) -> PyResult<Self> {
        ComplexField::new(grid.0, values).map(Self).map_err(to_py)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(self.0.grid())
    }

    fn values(&self) -> Vec<Complex64> {
        self.0.values().to_vec()
    }

    fn max_modulus(&self) -> f64 {
        self.0.max_modulus()
    }

    fn relative_l2_error(&self, reference: &PyField) -> f64 {
        self.0.relative_l2_error(&reference.0)
    }

    /// Length-averaged `(kinetic, potential, hamiltonian, norm_density)`.
    fn energies(&self) -> (f64, f64, f64, f64) {
        let e = nls::energies(&self.0);
        (e.kinetic, e.potential, e.hamiltonian, e.norm_density)
    }
}

#[pyclass(name = "FieldSeries", from_py_object)]
#[derive(Clone)]
struct PyFieldSeries(nls::FieldSeries);

#[pymethods]
impl PyFieldSeries {
    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(self.0.grid())
    }

    #[getter]
    fn t0(&self) -> f64 {
        self.0.t0()
    }

    #[getter]
    fn dt_sample(&self) -> f64 {
        self.0.dt_sample()
    }

    #[getter]
    fn provenance(&self) -> &str {
        self.0.provenance()
    }

    fn times(&self) -> Vec<f64> {
        self.0.times()
    }

    fn index_of(&self, t: f64) -> Option<usize> {
        self.0.index_of(t)
    }

    fn field(&self, j: usize) -> PyResult<PyField> {
        if j >= self.0.len() {
            return Err(PyIndexError::new_err(format!("frame {j} of {}", self.0.len())));
        }
        Ok(PyField(self.0.field(j)))
    }

    fn max_envelope(&self) -> Vec<f64> {
        (0..self.0.len()).map(|j| self.0.max_envelope(j)).collect()
    }

    fn slice(&self, start: usize, stop: usize) -> PyResult<Self> {
        self.0.slice(start..stop).map(Self).map_err(to_py)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        dataset::write_dataset(&self.0, path).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        dataset::read_dataset(path).map(Self).map_err(to_py)
    }
}

#[pyclass(name = "EsnModel", from_py_object)]
#[derive(Clone)]
struct PyEsnModel(esn::EsnModel);

#[pymethods]
impl PyEsnModel {
    /// Train a partitioned reservoir model on one or more series.
    #[staticmethod]
    #[pyo3(signature = (
        series, reservoirs, overlap, d_s=800, degree=3, rho=0.6, alpha=0.5, beta=1e-4,
        n_w=100, noise_var=0.02, noise_scale="variance", input_degree=1, seed=0, readout="shared"
    ))]
    #[allow(clippy::too_many_arguments)]
    fn train(
        series: Vec<PyFieldSeries>,
        reservoirs: usize,
        overlap: usize,
        d_s: usize,
        degree: usize,
        rho: f64,
        alpha: f64,
        beta: f64,
        n_w: usize,
        noise_var: f64,
        noise_scale: &str,
        input_degree: usize,
        seed: u64,
        readout: &str,
    ) -> PyResult<Self> {
        let noise_scale = match noise_scale {
            "variance" => NoiseScale::Variance,
            "std" | "stddev" => NoiseScale::StdDev,
            other => return Err(PyValueError::new_err(format!("unknown noise scale `{other}`"))),
        };
        let hp = EsnHyperParams {
            d_s,
            degree,
            rho,
            alpha,
            beta,
            n_w,
            noise_var,
            noise_scale,
            input_degree,
            seed,
        };
        let first = series.first().ok_or_else(|| PyValueError::new_err("no training series"))?;
        let partition = Partition::new(2 * first.0.grid().len(), reservoirs, overlap).map_err(to_py)?;
        let mode: ReadoutMode = readout.parse().map_err(to_py)?;
        let series: Vec<_> = series.into_iter().map(|s| s.0).collect();
        esn::EsnModel::train(&hp, partition, &series, mode).map(Self).map_err(to_py)
    }

    #[getter]
    fn reservoirs(&self) -> usize {
        self.0.partition().m_reservoirs()
    }

    #[getter]
    fn d_s(&self) -> usize {
        self.0.hyperparams().d_s
    }

    fn fingerprint(&self) -> String {
        forecast::model_fingerprint(&self.0)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        esn::write_checkpoint(&self.0, path).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        esn::read_checkpoint(path).map(Self).map_err(to_py)
    }

    /// Forecast from time `t0`; returns `(predicted series, nrmse list)`.
    #[pyo3(signature = (series, t0, steps, mode="auto", assimilate_every=None, normalize=false, epsilon=forecast::DEFAULT_EPSILON))]
    #[allow(clippy::too_many_arguments)]
    fn forecast(
        &self,
        series: &PyFieldSeries,
        t0: f64,
        steps: usize,
        mode: &str,
        assimilate_every: Option<usize>,
        normalize: bool,
        epsilon: f64,
    ) -> PyResult<(PyFieldSeries, Vec<f64>)> {
        let opts = options(&series.0, t0, steps, mode, assimilate_every, normalize, epsilon)?;
        let run = forecast::forecast(&self.0, &series.0, &opts).map_err(to_py)?;
        Ok((PyFieldSeries(run.predicted), run.nrmse))
    }

    /// Autonomous horizons from each start time, as `(t0, steps, censored, ph_time)`.
    #[pyo3(signature = (series, t0s, steps, epsilon=forecast::DEFAULT_EPSILON))]
    fn ph_sweep(
        &self,
        series: &PyFieldSeries,
        t0s: Vec<f64>,
        steps: usize,
        epsilon: f64,
    ) -> PyResult<Vec<(f64, usize, bool, f64)>> {
        let first = *t0s.first().ok_or_else(|| PyValueError::new_err("no start times"))?;
        let opts = options(&series.0, first, steps, "auto", None, false, epsilon)?;
        let points = forecast::ph_sweep(&self.0, &series.0, &t0s, &opts).map_err(to_py)?;
        Ok(points
            .into_iter()
            .map(|p| (p.t0, p.horizon.steps, p.horizon.censored, p.ph_time))
            .collect())
    }
}

#[allow(clippy::too_many_arguments)]
fn options(
    series: &nls::FieldSeries,
    t0: f64,
    steps: usize,
    mode: &str,
    assimilate_every: Option<usize>,
    normalize: bool,
    epsilon: f64,
) -> PyResult<ForecastOptions> {
    let mode: ForecastMode = mode.parse().map_err(to_py)?;
    let start_index = series
        .index_of(t0)
        .ok_or_else(|| PyValueError::new_err(format!("t0={t0} is not a sample time of the series")))?;
    Ok(ForecastOptions {
        mode,
        start_index,
        steps,
        assimilation_interval: assimilate_every.filter(|&n| n > 0),
        normalize,
        epsilon,
    })
}

/// `(a, omega, gamma)` of the mode with modulation parameter `a`.
#[pyfunction]
fn mode_params(a: f64) -> PyResult<(f64, f64, f64)> {
    let m = analytic::mode_params(a).map_err(to_py)?;
    Ok((m.a, m.omega, m.gamma))
}

/// Unstable harmonics of the fundamental `omega`, as `(a, omega, gamma)`.
#[pyfunction]
fn unstable_modes(omega: f64) -> PyResult<Vec<(f64, f64, f64)>> {
    let modes = analytic::unstable_modes(omega).map_err(to_py)?;
    Ok(modes.iter().map(|m| (m.a, m.omega, m.gamma)).collect())
}

#[pyfunction]
fn max_intensity_peak(omega: f64) -> PyResult<f64> {
    let modes = analytic::unstable_modes(omega).map_err(to_py)?;
    analytic::max_intensity_peak(&modes).map_err(to_py)
}

#[pyfunction]
fn akhmediev_field(a: f64, t: f64, grid: PyGrid) -> PyResult<PyField> {
    analytic::akhmediev_field(a, t, &grid.0).map(PyField).map_err(to_py)
}

#[pyfunction]
fn seeded_plane_wave(amplitude: f64, omega: f64, grid: PyGrid) -> PyResult<PyField> {
    analytic::seeded_plane_wave(amplitude, omega, &grid.0).map(PyField).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (initial, steps, dt=2e-4, stride=25, method="taylor", order=6, dealias=false, t0=0.0))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    initial: &PyField,
    steps: usize,
    dt: f64,
    stride: usize,
    method: &str,
    order: usize,
    dealias: bool,
    t0: f64,
) -> PyResult<PyFieldSeries> {
    let method: Method = method.parse().map_err(to_py)?;
    let cfg = SimulationConfig {
        dt,
        n_steps: steps,
        sample_stride: stride,
        method,
        order,
        dealias,
        t0,
    };
    let ic = initial.0.clone();
    py.detach(|| nls::simulate(&ic, &cfg)).map(PyFieldSeries).map_err(to_py)
}

/// Unit-norm NLS initial condition from a seeded JONSWAP sea state.
#[pyfunction]
#[pyo3(signature = (grid, seed, hs=8.0, tp=8.0, gamma_s=3.3))]
fn jonswap_initial_condition(grid: PyGrid, seed: u64, hs: f64, tp: f64, gamma_s: f64) -> PyResult<PyField> {
    let params = SeaStateParams {
        hs,
        tp,
        gamma_s,
        ..Default::default()
    };
    ocean::nls_initial_condition(&params, &grid.0, seed)
        .map(|ic| PyField(ic.psi))
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (f, hs=8.0, tp=8.0, gamma_s=3.3))]
fn jonswap_spectrum(f: f64, hs: f64, tp: f64, gamma_s: f64) -> PyResult<f64> {
    let params = SeaStateParams {
        hs,
        tp,
        gamma_s,
        ..Default::default()
    };
    ocean::jonswap_spectrum(f, &params).map_err(to_py)
}

/// Finite-time stretching rates along a trajectory, as `(t, chi, max_envelope)`.
#[pyfunction]
#[pyo3(signature = (trajectory, window, seed=0))]
fn stretching_series(
    py: Python<'_>,
    trajectory: &PyFieldSeries,
    window: f64,
    seed: u64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let series = py
        .detach(|| lyapunov::stretching_series(&trajectory.0, window, seed))
        .map_err(to_py)?;
    Ok(series.into_iter().map(|s| (s.t, s.chi, s.max_envelope)).collect())
}

#[pymodule]
fn rogue_rc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyFieldSeries>()?;
    m.add_class::<PyEsnModel>()?;
    m.add_function(wrap_pyfunction!(mode_params, m)?)?;
    m.add_function(wrap_pyfunction!(unstable_modes, m)?)?;
    m.add_function(wrap_pyfunction!(max_intensity_peak, m)?)?;
    m.add_function(wrap_pyfunction!(akhmediev_field, m)?)?;
    m.add_function(wrap_pyfunction!(seeded_plane_wave, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(jonswap_initial_condition, m)?)?;
    m.add_function(wrap_pyfunction!(jonswap_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(stretching_series, m)?)?;
    Ok(())
}
