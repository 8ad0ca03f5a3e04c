//! Python bindings for the qsljc core: the channel parameters, qubit
//! states, the dynamical map, back-flow measure, QSL times, and the
//! memory-kernel oracle.
//!
//! Build with `cargo build -p qsljc-py --release`; the produced
//! `libqsljc_py.so` imports as the `qsljc_py` module (see
//! `python/smoke_test.py`).

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qsljc_core::dynamics as dyn_;
use qsljc_core::model;
use qsljc_core::nonmarkov;
use qsljc_core::oracle;
use qsljc_core::qsl;

fn to_py_err(e: qsljc_core::Error) -> PyErr {
    if e.is_numerical() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Channel parameters (γ, λ, δ); rates in units of γ when γ = 1.
#[pyclass(name = "ModelParams", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyModelParams(model::ModelParams);

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (gamma0=1.0, lambda_=3.0, delta=0.0))]
    fn new(gamma0: f64, lambda_: f64, delta: f64) -> PyResult<Self> {
        model::ModelParams::new(gamma0, lambda_, delta)
            .map(PyModelParams)
            .map_err(to_py_err)
    }

    #[getter]
    fn gamma0(&self) -> f64 {
        self.0.gamma0()
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.0.lambda()
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.0.delta()
    }

    fn __repr__(&self) -> String {
        format!(
            "ModelParams(gamma0={}, lambda_={}, delta={})",
            self.0.gamma0(),
            self.0.lambda(),
            self.0.delta()
        )
    }
}

/// Bloch vector of a qubit state.
#[pyclass(name = "BlochState", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBlochState(dyn_::BlochState);

#[pymethods]
impl PyBlochState {
    #[new]
    fn new(rx: f64, ry: f64, rz: f64) -> PyResult<Self> {
        dyn_::BlochState::new(rx, ry, rz)
            .map(PyBlochState)
            .map_err(to_py_err)
    }

    #[getter]
    fn rx(&self) -> f64 {
        self.0.rx()
    }

    #[getter]
    fn ry(&self) -> f64 {
        self.0.ry()
    }

    #[getter]
    fn rz(&self) -> f64 {
        self.0.rz()
    }

    fn coherence(&self) -> f64 {
        self.0.coherence()
    }

    fn __repr__(&self) -> String {
        format!("BlochState({}, {}, {})", self.0.rx(), self.0.ry(), self.0.rz())
    }
}

/// 2×2 density matrix in the {|e>, |g>} basis.
#[pyclass(name = "DensityMatrix", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDensityMatrix(dyn_::DensityMatrix);

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(entries: [[Complex64; 2]; 2]) -> PyResult<Self> {
        dyn_::DensityMatrix::new(entries)
            .map(PyDensityMatrix)
            .map_err(to_py_err)
    }

    #[staticmethod]
    fn from_bloch(b: &PyBlochState) -> Self {
        PyDensityMatrix(dyn_::DensityMatrix::from_bloch(&b.0))
    }

    #[staticmethod]
    fn excited() -> Self {
        PyDensityMatrix(dyn_::DensityMatrix::excited())
    }

    #[staticmethod]
    fn ground() -> Self {
        PyDensityMatrix(dyn_::DensityMatrix::ground())
    }

    fn entries(&self) -> [[Complex64; 2]; 2] {
        self.0.entries()
    }

    fn purity(&self) -> f64 {
        self.0.purity()
    }

    fn bloch(&self) -> PyBlochState {
        PyBlochState(self.0.bloch())
    }

    fn __repr__(&self) -> String {
        let m = self.0.entries();
        format!("DensityMatrix([[{}, {}], [{}, {}]])", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// Amplitude sample (t, k, kdot).
#[pyclass(name = "AmplitudeSample", frozen)]
struct PyAmplitudeSample(model::AmplitudeSample);

#[pymethods]
impl PyAmplitudeSample {
    #[getter]
    fn t(&self) -> f64 {
        self.0.t
    }

    #[getter]
    fn k(&self) -> Complex64 {
        self.0.k
    }

    #[getter]
    fn kdot(&self) -> Complex64 {
        self.0.kdot
    }

    fn __repr__(&self) -> String {
        format!("AmplitudeSample(t={}, k={}, kdot={})", self.0.t, self.0.k, self.0.kdot)
    }
}

/// One W > 0 interval with its recovered gain.
#[pyclass(name = "RevivalInterval", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRevivalInterval(nonmarkov::RevivalInterval);

#[pymethods]
impl PyRevivalInterval {
    #[getter]
    fn t_start(&self) -> f64 {
        self.0.t_start
    }

    #[getter]
    fn t_end(&self) -> f64 {
        self.0.t_end
    }

    #[getter]
    fn gain(&self) -> f64 {
        self.0.gain
    }

    fn __repr__(&self) -> String {
        format!(
            "RevivalInterval({}, {}, gain={})",
            self.0.t_start, self.0.t_end, self.0.gain
        )
    }
}

/// Back-flow measure result.
#[pyclass(name = "NonMarkovResult", frozen)]
struct PyNonMarkovResult(nonmarkov::NonMarkovResult);

#[pymethods]
impl PyNonMarkovResult {
    #[getter]
    fn n_value(&self) -> f64 {
        self.0.n_value
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.0.horizon
    }

    #[getter]
    fn tail_bound(&self) -> f64 {
        self.0.tail_bound
    }

    #[getter]
    fn intervals(&self) -> Vec<PyRevivalInterval> {
        self.0.intervals.iter().copied().map(PyRevivalInterval).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "NonMarkovResult(n_value={}, intervals={}, horizon={})",
            self.0.n_value,
            self.0.intervals.len(),
            self.0.horizon
        )
    }
}

/// QSL time with its building blocks.
#[pyclass(name = "QslResult", frozen)]
struct PyQslResult(qsl::QslResult);

#[pymethods]
impl PyQslResult {
    #[getter]
    fn tau_qsl(&self) -> f64 {
        self.0.tau_qsl
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.0.tau
    }

    #[getter]
    fn ratio(&self) -> f64 {
        self.0.ratio
    }

    #[getter]
    fn phi_op(&self) -> f64 {
        self.0.phi_op
    }

    #[getter]
    fn phi_tr(&self) -> f64 {
        self.0.phi_tr
    }

    #[getter]
    fn phi_hs(&self) -> f64 {
        self.0.phi_hs
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta
    }

    #[getter]
    fn stationary(&self) -> bool {
        self.0.stationary
    }

    fn __repr__(&self) -> String {
        format!(
            "QslResult(tau_qsl={}, tau={}, ratio={}, stationary={})",
            self.0.tau_qsl, self.0.tau, self.0.ratio, self.0.stationary
        )
    }
}

/// Pseudo-Rabi rate Ω (principal branch).
#[pyfunction]
fn omega(p: &PyModelParams) -> Complex64 {
    p.0.omega()
}

/// Amplitude k(t) and its derivative.
#[pyfunction]
fn amplitude(p: &PyModelParams, t: f64) -> PyResult<PyAmplitudeSample> {
    p.0.amplitude(t).map(PyAmplitudeSample).map_err(to_py_err)
}

/// Time-dependent decay rate γ(t); None at the revival poles.
#[pyfunction]
fn decay_rate(p: &PyModelParams, t: f64) -> PyResult<Option<f64>> {
    Ok(p.0.decay_rate(t).map_err(to_py_err)?.value())
}

/// Lorentzian spectral density J(ω) for qubit frequency ω₀.
#[pyfunction]
fn spectral_density(p: &PyModelParams, w: f64, w0: f64) -> f64 {
    p.0.spectral_density(w, w0)
}

/// Environment correlation function f(Δt).
#[pyfunction]
fn correlation_function(p: &PyModelParams, dt: f64) -> PyResult<Complex64> {
    p.0.correlation_function(dt).map_err(to_py_err)
}

/// Image of rho0 under the dynamical map at time t.
#[pyfunction]
fn evolve(p: &PyModelParams, rho0: &PyDensityMatrix, t: f64) -> PyResult<PyDensityMatrix> {
    dyn_::evolve(&p.0, &rho0.0, t)
        .map(PyDensityMatrix)
        .map_err(to_py_err)
}

/// Excited-state population at time t.
#[pyfunction]
fn population(p: &PyModelParams, rho0: &PyDensityMatrix, t: f64) -> PyResult<f64> {
    dyn_::population(&p.0, &rho0.0, t).map_err(to_py_err)
}

/// l1 coherence of a state.
#[pyfunction]
fn l1_coherence(rho: &PyDensityMatrix) -> f64 {
    dyn_::l1_coherence(&rho.0)
}

/// Trace distance between two states.
#[pyfunction]
fn trace_distance(a: &PyDensityMatrix, b: &PyDensityMatrix) -> f64 {
    dyn_::trace_distance(&a.0, &b.0)
}

/// Relative-purity angle Θ(rho0, rhot).
#[pyfunction]
fn relative_purity_angle(rho0: &PyDensityMatrix, rhot: &PyDensityMatrix) -> f64 {
    dyn_::relative_purity_angle(&rho0.0, &rhot.0)
}

/// Back-flow witness W_t for the antipodal pair.
#[pyfunction]
fn witness(p: &PyModelParams, t: f64) -> PyResult<f64> {
    nonmarkov::witness(&p.0, t).map_err(to_py_err)
}

/// W > 0 intervals up to the horizon.
#[pyfunction]
fn find_revivals(p: &PyModelParams, horizon: f64) -> PyResult<Vec<PyRevivalInterval>> {
    Ok(nonmarkov::find_revivals(&p.0, horizon)
        .map_err(to_py_err)?
        .into_iter()
        .map(PyRevivalInterval)
        .collect())
}

/// Back-flow measure; horizon None means automatic (18.5/λ).
#[pyfunction]
#[pyo3(signature = (p, horizon=None))]
fn non_markovianity(p: &PyModelParams, horizon: Option<f64>) -> PyResult<PyNonMarkovResult> {
    let h = match horizon {
        None => nonmarkov::Horizon::Auto,
        Some(t) => nonmarkov::Horizon::Fixed(t),
    };
    nonmarkov::non_markovianity(&p.0, h)
        .map(PyNonMarkovResult)
        .map_err(to_py_err)
}

/// Time-averaged (op, tr, hs) norms of rho-dot over [0, tau].
#[pyfunction]
fn phi_norms(p: &PyModelParams, b: &PyBlochState, tau: f64) -> PyResult<(f64, f64, f64)> {
    let n = qsl::phi_norms(&p.0, &b.0, tau).map_err(to_py_err)?;
    Ok((n.op, n.tr, n.hs))
}

/// QSL time via the general (matrix) route.
#[pyfunction]
fn qsl_time(p: &PyModelParams, b: &PyBlochState, tau: f64) -> PyResult<PyQslResult> {
    qsl::qsl_time(&p.0, &b.0, tau)
        .map(PyQslResult)
        .map_err(to_py_err)
}

/// QSL time via the Bloch closed form (complex-safe).
#[pyfunction]
fn qsl_closed_form(p: &PyModelParams, b: &PyBlochState, tau: f64) -> PyResult<PyQslResult> {
    qsl::qsl_closed_form(&p.0, &b.0, tau)
        .map(PyQslResult)
        .map_err(to_py_err)
}

/// Resonance-only literal closed form (real k); cross-check at delta = 0.
#[pyfunction]
fn qsl_closed_form_resonant(
    p: &PyModelParams,
    b: &PyBlochState,
    tau: f64,
) -> PyResult<PyQslResult> {
    qsl::qsl_closed_form_resonant(&p.0, &b.0, tau)
        .map(PyQslResult)
        .map_err(to_py_err)
}

/// QSL time from (coherence, <sigma_z>) initial data.
#[pyfunction]
fn qsl_from_coherence(p: &PyModelParams, c0: f64, sz0: f64, tau: f64) -> PyResult<PyQslResult> {
    let cp = qsl::CoherenceParams::new(c0, sz0).map_err(to_py_err)?;
    qsl::qsl_from_coherence(&p.0, &cp, tau)
        .map(PyQslResult)
        .map_err(to_py_err)
}

/// Brute-force memory-kernel march of the amplitude; returns (times, c).
#[pyfunction]
fn volterra_amplitude(
    p: &PyModelParams,
    step: f64,
    t_max: f64,
) -> PyResult<(Vec<f64>, Vec<Complex64>)> {
    let cfg = oracle::IntegratorConfig::new(step, t_max, 1e-9).map_err(to_py_err)?;
    let sol = oracle::solve_volterra(&p.0, &cfg).map_err(to_py_err)?;
    Ok((sol.times, sol.c))
}

#[pymodule]
fn qsljc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyBlochState>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyAmplitudeSample>()?;
    m.add_class::<PyRevivalInterval>()?;
    m.add_class::<PyNonMarkovResult>()?;
    m.add_class::<PyQslResult>()?;
    m.add_function(wrap_pyfunction!(omega, m)?)?;
    m.add_function(wrap_pyfunction!(amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(decay_rate, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_density, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_function, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(population, m)?)?;
    m.add_function(wrap_pyfunction!(l1_coherence, m)?)?;
    m.add_function(wrap_pyfunction!(trace_distance, m)?)?;
    m.add_function(wrap_pyfunction!(relative_purity_angle, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(find_revivals, m)?)?;
    m.add_function(wrap_pyfunction!(non_markovianity, m)?)?;
    m.add_function(wrap_pyfunction!(phi_norms, m)?)?;
    m.add_function(wrap_pyfunction!(qsl_time, m)?)?;
    m.add_function(wrap_pyfunction!(qsl_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(qsl_closed_form_resonant, m)?)?;
    m.add_function(wrap_pyfunction!(qsl_from_coherence, m)?)?;
    m.add_function(wrap_pyfunction!(volterra_amplitude, m)?)?;
    Ok(())
}
