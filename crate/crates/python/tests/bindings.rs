use pyo3::prelude::*;
use pyo3::types::PyDict;
use pyo3::wrap_pymodule;

fn with_module(code: &str) {
    Python::initialize();
    Python::attach(|py| {
        let m = wrap_pymodule!(conslaw::conslaw)(py);
        let locals = PyDict::new(py);
        locals.set_item("conslaw", m).unwrap();
        let code = std::ffi::CString::new(code).unwrap();
        py.run(&code, None, Some(&locals)).unwrap_or_else(|e| panic!("{e}"));
    });
}

#[test]
fn roll_round_trips_through_json() {
    with_module(
        "r = conslaw.solve_roll(0.04, 0.1, 0.3, modes=12)\n\
         assert r.residual_norm < 1e-10\n\
         assert conslaw.Roll.from_json(r.to_json()).coefficients() == r.coefficients()\n",
    );
}

#[test]
fn validation_and_numerical_errors_map_to_python_types() {
    with_module(
        "try:\n    conslaw.solve_roll(0.05, 0.0, 4.0)\n    raise AssertionError('accepted')\nexcept ValueError:\n    pass\n\
         r = conslaw.solve_roll(0.05, 0.0, 0.0, modes=12)\n\
         try:\n    conslaw.bloch_spectrum(r, 0.0, delta=100.0)\n    raise AssertionError('accepted')\nexcept conslaw.NumericalError:\n    pass\n",
    );
}

#[test]
fn eigenvalues_are_python_complex() {
    with_module(
        "z = conslaw.cardano_roots(0.0, 1.0, 0.0)\n\
         assert all(isinstance(v, complex) for v in z)\n\
         assert sorted(abs(v) for v in z) == [0.0, 1.0, 1.0]\n",
    );
}
