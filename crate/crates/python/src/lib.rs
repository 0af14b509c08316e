//! Python bindings: `import conslaw`.

use conslaw_core::bloch::{assemble_bloch, bloch_spectrum as core_spectrum, DEFAULT_DELTA};
use conslaw_core::error::Error;
use conslaw_core::evolution::{evolve as core_evolve, EvolutionConfig};
use conslaw_core::fourier::SpectralGrid;
use conslaw_core::mgl::{compare_exact_vs_mgl, mgl_dispersion_matrix, MglParameters};
use conslaw_core::reduced::{self, default_sigma_grid};
use conslaw_core::roll::{self, RollParameters, RollSolution, DEFAULT_TOL};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(conslaw, NumericalError, PyRuntimeError);

fn to_py(e: Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        NumericalError::new_err(e.to_string())
    }
}

/// A converged roll profile.
#[pyclass(frozen, module = "conslaw")]
pub struct Roll {
    inner: RollSolution,
}

#[pymethods]
impl Roll {
    #[getter]
    fn eps(&self) -> f64 {
        self.inner.params.eps
    }
    #[getter]
    fn omega(&self) -> f64 {
        self.inner.params.omega
    }
    #[getter]
    fn s(&self) -> f64 {
        self.inner.params.s
    }
    #[getter]
    fn k(&self) -> f64 {
        self.inner.k
    }
    #[getter]
    fn q(&self) -> f64 {
        self.inner.q
    }
    #[getter]
    fn residual_norm(&self) -> f64 {
        self.inner.residual_norm
    }
    #[getter]
    fn newton_iters(&self) -> usize {
        self.inner.newton_iters
    }
    #[getter]
    fn modes(&self) -> usize {
        self.inner.profile.n_modes()
    }

    /// `(m, re, im)` for `m = −M..=M`.
    fn coefficients(&self) -> Vec<(i64, f64, f64)> {
        self.inner.profile.to_triples()
    }

    /// Coefficient of `cos(mξ)`.
    fn cosine_coeff(&self, m: usize) -> f64 {
        self.inner.profile.cosine_coeff(m)
    }

    fn evaluate(&self, xi: f64) -> f64 {
        self.inner.profile.evaluate(xi)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Roll { inner })
    }

    fn __repr__(&self) -> String {
        let p = self.inner.params;
        format!(
            "Roll(eps={}, omega={}, s={}, modes={}, residual={:e})",
            p.eps,
            p.omega,
            p.s,
            self.inner.profile.n_modes(),
            self.inner.residual_norm
        )
    }
}

impl Roll {
    fn grid(&self) -> PyResult<SpectralGrid> {
        SpectralGrid::new(self.inner.profile.n_modes()).map_err(to_py)
    }
}

#[pyfunction]
#[pyo3(signature = (eps, omega, s, modes = 32, tol = DEFAULT_TOL))]
fn solve_roll(eps: f64, omega: f64, s: f64, modes: usize, tol: f64) -> PyResult<Roll> {
    let p = RollParameters::new(eps, omega, s).map_err(to_py)?;
    let grid = SpectralGrid::new(modes).map_err(to_py)?;
    let inner = roll::solve_roll(&p, &grid, tol).map_err(to_py)?;
    Ok(Roll { inner })
}

/// Full Bloch spectrum at `sigma`: eigenvalues (descending real part), critical indices, gap.
#[pyfunction]
#[pyo3(signature = (roll, sigma, delta = DEFAULT_DELTA))]
fn bloch_spectrum<'py>(py: Python<'py>, roll: &Roll, sigma: f64, delta: f64) -> PyResult<Bound<'py, PyDict>> {
    let op = assemble_bloch(&roll.inner, sigma, &roll.grid()?).map_err(to_py)?;
    let sp = core_spectrum(&op, delta).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("sigma", sp.sigma)?;
    d.set_item("critical", sp.critical_values().to_vec())?;
    d.set_item("critical_indices", sp.critical.to_vec())?;
    d.set_item("gap", sp.gap)?;
    d.set_item("eigenvalues", sp.eigenvalues)?;
    Ok(d)
}

/// The three critical Bloch eigenvalues at `sigma`, descending real part.
#[pyfunction]
#[pyo3(signature = (roll, sigma, delta = DEFAULT_DELTA))]
fn critical_eigenvalues(roll: &Roll, sigma: f64, delta: f64) -> PyResult<Vec<Complex64>> {
    let op = assemble_bloch(&roll.inner, sigma, &roll.grid()?).map_err(to_py)?;
    let mut v = core_spectrum(&op, delta).map_err(to_py)?.critical_values();
    v.sort_by(|a, b| b.re.total_cmp(&a.re));
    Ok(v.to_vec())
}

/// `(λ₁ curvature, λ₋, λ₊)` of the critical curves near `σ = 0`.
#[pyfunction]
fn small_sigma_expansion(omega: f64, s: f64) -> PyResult<(f64, f64, f64)> {
    let e = reduced::small_sigma_expansion(omega, s).map_err(to_py)?;
    Ok((e.lambda1_curvature, e.lambda_minus, e.lambda_plus))
}

/// `"stable"`, `"unstable"` or `"boundary"` from the closed-form band.
#[pyfunction]
fn stability_predicate(omega: f64, s: f64) -> PyResult<&'static str> {
    Ok(reduced::stability_predicate(omega, s).map_err(to_py)?.as_str())
}

#[pyfunction]
fn band_product(omega: f64, s: f64) -> f64 {
    reduced::band_product(omega, s)
}

/// Numerical verdict from the Bloch spectra over the default sigma grid.
#[pyfunction]
#[pyo3(signature = (roll, delta = DEFAULT_DELTA))]
fn classify<'py>(py: Python<'py>, roll: &Roll, delta: f64) -> PyResult<Bound<'py, PyDict>> {
    let sigmas = default_sigma_grid(roll.inner.params.eps);
    let v = reduced::classify_numerically(&roll.inner, &sigmas, &roll.grid()?, delta).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("verdict", v.verdict.as_str())?;
    d.set_item("witness_sigma", v.witness_sigma)?;
    d.set_item("witness_lambda", v.witness_lambda)?;
    Ok(d)
}

#[pyfunction]
fn cardano_roots(a2: f64, a1: f64, a0: f64) -> Vec<Complex64> {
    reduced::cardano_roots(a2, a1, a0).roots.to_vec()
}

#[pyfunction]
fn companion_roots(a2: f64, a1: f64, a0: f64) -> Vec<Complex64> {
    reduced::companion_roots(a2, a1, a0).to_vec()
}

/// Eigenvalues of the amplitude-equation dispersion matrix at `sigma_hat`.
#[pyfunction]
fn mgl_dispersion(omega: f64, s: f64, sigma_hat: f64) -> PyResult<Vec<Complex64>> {
    let p = MglParameters::new(omega, s).map_err(to_py)?;
    Ok(mgl_dispersion_matrix(&p, sigma_hat).eigenvalues.to_vec())
}

/// Rows `{sigma_hat, exact, mgl, deviation}` with exact eigenvalues divided by `eps²`.
#[pyfunction]
#[pyo3(signature = (roll, sigma_hats, delta = DEFAULT_DELTA))]
fn compare<'py>(py: Python<'py>, roll: &Roll, sigma_hats: Vec<f64>, delta: f64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let rows = compare_exact_vs_mgl(&roll.inner, &sigma_hats, &roll.grid()?, delta).map_err(to_py)?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("sigma_hat", r.sigma_hat)?;
            d.set_item("exact", r.exact.to_vec())?;
            d.set_item("mgl", r.mgl.to_vec())?;
            d.set_item("deviation", r.deviation)?;
            Ok(d)
        })
        .collect()
}

/// Evolves the roll seeded with its leading Bloch mode at `sigma = j/periods`.
#[pyfunction]
#[pyo3(signature = (roll, sigma, periods, dt = 0.5, t_final = 100.0, amplitude = EvolutionConfig::DEFAULT_AMPLITUDE))]
fn evolve<'py>(
    py: Python<'py>,
    roll: &Roll,
    sigma: f64,
    periods: usize,
    dt: f64,
    t_final: f64,
    amplitude: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let config = EvolutionConfig {
        n_periods: periods,
        dt,
        t_final,
        perturbation_amplitude: amplitude,
        seed_sigma: sigma,
    };
    let run = py.detach(|| core_evolve(&roll.inner, &config)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("predicted_rate", run.predicted_rate)?;
    d.set_item("growth_rate", run.growth_rate())?;
    d.set_item("mass_drift", run.mass_drift())?;
    d.set_item("t", run.samples.iter().map(|s| s.t).collect::<Vec<_>>())?;
    d.set_item(
        "perturbation_norm",
        run.samples.iter().map(|s| s.perturbation_norm).collect::<Vec<_>>(),
    )?;
    d.set_item("mass", run.samples.iter().map(|s| s.mass).collect::<Vec<_>>())?;
    Ok(d)
}

#[pymodule]
pub fn conslaw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Roll>()?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_function(wrap_pyfunction!(solve_roll, m)?)?;
    m.add_function(wrap_pyfunction!(bloch_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(critical_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(small_sigma_expansion, m)?)?;
    m.add_function(wrap_pyfunction!(stability_predicate, m)?)?;
    m.add_function(wrap_pyfunction!(band_product, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(cardano_roots, m)?)?;
    m.add_function(wrap_pyfunction!(companion_roots, m)?)?;
    m.add_function(wrap_pyfunction!(mgl_dispersion, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    Ok(())
}
