"""Smoke test for the conslaw extension module. Run after `pip install --no-build-isolation -e crates/python`."""

import json
import math

import conslaw


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    roll = conslaw.solve_roll(0.05, 0.0, 0.5, modes=16)
    assert roll.residual_norm < 1e-10, roll
    assert roll.cosine_coeff(1) > 0
    assert close(roll.evaluate(0.0), sum(roll.cosine_coeff(m) for m in range(17)), 1e-12)
    again = conslaw.Roll.from_json(roll.to_json())
    assert again.coefficients() == roll.coefficients()
    assert json.loads(roll.to_json())["params"]["s"] == 0.5

    # co-periodic triple: c(eps) and two zeros
    crit = conslaw.critical_eigenvalues(roll, 0.0)
    c_eps = -2.0 * 0.05**2
    re = sorted(z.real for z in crit)
    assert close(re[0], c_eps, 5 * 0.05**3) and abs(re[1]) < 1e-9 and abs(re[2]) < 1e-9, crit

    sp = conslaw.bloch_spectrum(roll, 0.1)
    assert sp["gap"] > 3 and len(sp["eigenvalues"]) == 2 * 16 + 1

    assert conslaw.stability_predicate(0.0, 0.0) == "stable"
    assert conslaw.stability_predicate(0.4, 0.0) == "unstable"
    assert close(conslaw.band_product(0.0, 0.0), 4.0, 1e-15)
    l1, lm, lp = conslaw.small_sigma_expansion(0.0, 0.0)
    assert close(l1, -4.0, 1e-12) and close(lm * lp, 4.0, 1e-12)
    assert conslaw.classify(conslaw.solve_roll(0.02, 0.0, 0.0, modes=12))["verdict"] == "stable"

    roots = sorted(conslaw.cardano_roots(6.0, 11.0, 6.0), key=lambda z: z.real)
    assert all(close(r.real, e, 1e-12) and abs(r.imag) < 1e-12 for r, e in zip(roots, [-3, -2, -1]))
    assert len(conslaw.companion_roots(1.0, 2.0, 3.0)) == 3

    lam = conslaw.mgl_dispersion(0.25, 1.0, 0.0)
    assert close(max(z.real for z in lam), 0.0, 1e-12)
    rows = conslaw.compare(conslaw.solve_roll(0.02, 0.25, 1.0, modes=12), [-0.5, 0.0, 0.5])
    assert len(rows) == 3 and rows[1]["deviation"] < 0.1

    run = conslaw.evolve(conslaw.solve_roll(0.02, 0.2, 0.0, modes=12), 0.25, 4, dt=0.5, t_final=100.0)
    assert close(run["growth_rate"], run["predicted_rate"], 0.05 * abs(run["predicted_rate"])), run["growth_rate"]
    assert run["mass_drift"] < 1e-12

    try:
        conslaw.solve_roll(0.05, 0.7, 0.0)
    except ValueError as e:
        assert "omega" in str(e)
    else:
        raise AssertionError("omega out of range accepted")
    assert issubclass(conslaw.NumericalError, RuntimeError)
    try:
        conslaw.bloch_spectrum(roll, 0.0, delta=100.0)
    except conslaw.NumericalError as e:
        assert "gap" in str(e)
    else:
        raise AssertionError("gap violation not reported")

    assert math.isfinite(l1)
    print("python smoke test passed:", roll, f"growth {run['growth_rate']:.6e}")


if __name__ == "__main__":
    main()
