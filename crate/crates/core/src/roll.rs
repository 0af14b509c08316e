//! Stationary rolls by Newton–Galerkin iteration on even Fourier series.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_finite, Error, Result};
use crate::fourier::{dealiased_points, nonlinear_rhs, PeriodicField, SpectralGrid};

/// Largest ε accepted by [`solve_roll`].
pub const MAX_EPS: f64 = 0.2;
/// Smallest Newton tolerance accepted by [`solve_roll`].
pub const MIN_TOL: f64 = 1e-13;
pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_NEWTON: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RollParameters {
    pub eps: f64,
    pub omega: f64,
    pub s: f64,
}

impl RollParameters {
    /// Validates `ε ≥ 0`, `|ω| ≤ 1/2` and `27 − 2s² > 0`.
    pub fn new(eps: f64, omega: f64, s: f64) -> Result<Self> {
        require_finite("eps", eps)?;
        require_finite("omega", omega)?;
        require_finite("s", s)?;
        if eps < 0.0 {
            return Err(Error::OutOfRange {
                name: "eps",
                value: eps,
                range: "[0, ∞)",
            });
        }
        if omega.abs() > 0.5 {
            return Err(Error::OutOfRange {
                name: "omega",
                value: omega,
                range: "[-1/2, 1/2]",
            });
        }
        if 27.0 - 2.0 * s * s <= 0.0 {
            return Err(Error::OutOfRange {
                name: "s",
                value: s,
                range: "(-sqrt(27/2), sqrt(27/2))",
            });
        }
        Ok(RollParameters { eps, omega, s })
    }

    /// Wavenumber `k = √(1 + 2ωε)`.
    pub fn k(&self) -> f64 {
        (1.0 + 2.0 * self.omega * self.eps).sqrt()
    }

    /// `(1 − 4ω²)/(27 − 2s²)`.
    pub fn amplitude_ratio(&self) -> f64 {
        (1.0 - 4.0 * self.omega * self.omega) / (27.0 - 2.0 * self.s * self.s)
    }

    fn at_band_edge(&self) -> bool {
        self.omega.abs() == 0.5
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollSolution {
    pub params: RollParameters,
    pub k: f64,
    pub q: f64,
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub profile: PeriodicField,
}

impl RollSolution {
    /// The trivial state `u ≡ 0`, which is the roll at `|ω| = 1/2` and at `ε = 0`.
    pub fn trivial(params: RollParameters, n_modes: usize) -> Self {
        RollSolution {
            params,
            k: params.k(),
            q: 0.0,
            residual_norm: 0.0,
            newton_iters: 0,
            profile: PeriodicField::zeros(n_modes),
        }
    }
}

/// `𝒜 = 36(1−4ω²)/(27−2s²)·ε² − 384ωs²(1−4ω²)/(27−2s²)²·ε³`.
pub fn amplitude_a(p: &RollParameters) -> f64 {
    let w = 1.0 - 4.0 * p.omega * p.omega;
    let d = 27.0 - 2.0 * p.s * p.s;
    36.0 * w / d * p.eps.powi(2) - 384.0 * p.omega * p.s * p.s * w / (d * d) * p.eps.powi(3)
}

/// `α = 6√A·ε − 32ωs²√(A/(27−2s²)²)·ε²` with `A = (1−4ω²)/(27−2s²)`.
pub fn amplitude_alpha(p: &RollParameters) -> f64 {
    let a = p.amplitude_ratio();
    let d = 27.0 - 2.0 * p.s * p.s;
    6.0 * a.sqrt() * p.eps - 32.0 * p.omega * p.s * p.s * (a / (d * d)).sqrt() * p.eps * p.eps
}

/// Two-term small-ε expansion of the roll.
pub fn asymptotic_roll(p: &RollParameters, grid: &SpectralGrid) -> PeriodicField {
    let a = p.amplitude_ratio();
    let c2 = -2.0 * p.s * a * p.eps * p.eps;
    PeriodicField::from_cosine_coeffs(grid.n_modes(), &[0.0, amplitude_alpha(p), c2])
}

/// Cosine coefficient of `cos ξ` in the computed profile.
pub fn measured_alpha(roll: &RollSolution) -> f64 {
    roll.profile.cosine_coeff(1)
}

fn validate_solve(p: &RollParameters, tol: f64) -> Result<()> {
    require_finite("tol", tol)?;
    if tol < MIN_TOL {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            range: "[1e-13, ∞)",
        });
    }
    if p.eps > MAX_EPS {
        return Err(Error::OutOfRange {
            name: "eps",
            value: p.eps,
            range: "[0, 0.2]",
        });
    }
    Ok(())
}

/// Even, zero-mean roll of the stationary problem with Lagrange constant `q`.
///
/// Newton starts from [`asymptotic_roll`]; if it stalls, the solution is
/// continued in ε from `ε/2`.
pub fn solve_roll(p: &RollParameters, grid: &SpectralGrid, tol: f64) -> Result<RollSolution> {
    validate_solve(p, tol)?;
    if p.at_band_edge() || p.eps == 0.0 {
        return Ok(RollSolution::trivial(*p, grid.n_modes()));
    }
    let start = cosine_unknowns(&asymptotic_roll(p, grid));
    let (c, iters) = match newton(p, grid.n_modes(), start, tol) {
        Ok(found) => found,
        Err(err) => continue_in_eps(p, grid, tol, 0).map_err(|_| err)?,
    };
    finish(p, grid.n_modes(), &c, iters)
}

fn continue_in_eps(p: &RollParameters, grid: &SpectralGrid, tol: f64, depth: usize) -> Result<(DVector<f64>, usize)> {
    if depth > 6 {
        return Err(Error::NoConvergence {
            iterations: MAX_NEWTON,
            residual: f64::NAN,
        });
    }
    let half = RollParameters { eps: p.eps / 2.0, ..*p };
    let start = cosine_unknowns(&asymptotic_roll(&half, grid));
    let (c_half, mut total) = match newton(&half, grid.n_modes(), start, tol) {
        Ok(found) => found,
        Err(_) => continue_in_eps(&half, grid, tol, depth + 1)?,
    };
    // Secant-type predictor along the amplitude ∝ ε branch.
    let mut c = c_half.clone();
    let mut prev = c_half;
    for step in 1..=4 {
        let eps = p.eps / 2.0 * (1.0 + step as f64 / 4.0);
        let q = RollParameters { eps, ..*p };
        let guess = &c + (&c - &prev) * 0.5;
        let (next, iters) = newton(&q, grid.n_modes(), guess, tol)?;
        total += iters;
        prev = std::mem::replace(&mut c, next);
    }
    Ok((c, total))
}

fn cosine_unknowns(f: &PeriodicField) -> DVector<f64> {
    DVector::from_iterator(f.n_modes(), (1..=f.n_modes()).map(|m| f.coeff(m as i64).re))
}

fn field_from_unknowns(c: &DVector<f64>) -> PeriodicField {
    let n = c.len();
    let mut f = PeriodicField::zeros(n);
    for (i, &v) in c.iter().enumerate() {
        f.set_pair(i as i64 + 1, Complex64::new(v, 0.0));
    }
    f
}

fn bracket_symbol(m: usize, k: f64, eps: f64) -> f64 {
    let kk = k * k * (m * m) as f64;
    -(1.0 - kk).powi(2) + eps * eps
}

fn newton(p: &RollParameters, n_modes: usize, mut c: DVector<f64>, tol: f64) -> Result<(DVector<f64>, usize)> {
    let k = p.k();
    let s = p.s;
    let n_points = dealiased_points(n_modes);
    let mut converged_at: Option<(usize, f64)> = None;
    let mut best = (c.clone(), f64::INFINITY);
    for iter in 1..=MAX_NEWTON {
        let u = field_from_unknowns(&c);
        let poly = u.pointwise(n_modes, n_points, |x| s * x * x + x * x * x);
        let slope = u.pointwise(2 * n_modes, n_points, |x| 2.0 * s * x + 3.0 * x * x);
        let residual = DVector::from_iterator(
            n_modes,
            (1..=n_modes).map(|m| bracket_symbol(m, k, p.eps) * c[m - 1] - poly.coeff(m as i64).re),
        );
        let rhs_norm = spectral_residual(&u, p);
        if rhs_norm < best.1 {
            best = (c.clone(), rhs_norm);
        }
        if !rhs_norm.is_finite() {
            break;
        }
        match converged_at {
            None if rhs_norm < tol => converged_at = Some((iter, rhs_norm)),
            // polish to the rounding floor, then stop once progress stalls
            Some((first, last)) if rhs_norm > 0.1 * last || iter > first + 3 => break,
            Some((first, _)) => converged_at = Some((first, rhs_norm)),
            None => {}
        }
        let jac = DMatrix::from_fn(n_modes, n_modes, |i, j| {
            let (m, n) = (i as i64 + 1, j as i64 + 1);
            let diag = if i == j { bracket_symbol(i + 1, k, p.eps) } else { 0.0 };
            diag - slope.coeff(m - n).re - slope.coeff(m + n).re
        });
        let Some(delta) = jac.lu().solve(&residual) else {
            break;
        };
        c -= delta;
    }
    match converged_at {
        Some((iters, _)) if best.1 < tol => Ok((best.0, iters)),
        _ => Err(Error::NoConvergence {
            iterations: MAX_NEWTON,
            residual: best.1,
        }),
    }
}

fn spectral_residual(u: &PeriodicField, p: &RollParameters) -> f64 {
    nonlinear_rhs(u, p.s, p.eps, p.k()).max_abs()
}

fn finish(p: &RollParameters, n_modes: usize, c: &DVector<f64>, iters: usize) -> Result<RollSolution> {
    let mut profile = field_from_unknowns(c);
    let alpha = amplitude_alpha(p);
    if profile.max_abs() < 1e-3 * alpha.abs() {
        return Err(Error::TrivialCollapse);
    }
    if profile.evaluate(0.0) < 0.0 {
        profile = profile.half_period_shift();
    }
    let k = p.k();
    let n_points = dealiased_points(n_modes);
    let s = p.s;
    let poly = profile.pointwise(0, n_points, |x| s * x * x + x * x * x);
    Ok(RollSolution {
        params: *p,
        k,
        q: k * k * poly.mean(),
        residual_norm: spectral_residual(&profile, p),
        newton_iters: iters,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> SpectralGrid {
        SpectralGrid::new(16).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(RollParameters::new(0.05, 0.6, 0.0).is_err());
        assert!(RollParameters::new(0.05, 0.0, 3.7).is_err());
        assert!(RollParameters::new(-0.1, 0.0, 0.0).is_err());
        assert!(RollParameters::new(f64::NAN, 0.0, 0.0).is_err());
        let p = RollParameters::new(0.05, 0.25, 0.0).unwrap();
        assert_abs_diff_eq!(p.k(), 1.025f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.k(), 1.0124228, epsilon = 1e-7);
    }

    #[test]
    fn asymptotic_examples() {
        let p = RollParameters::new(0.05, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(asymptotic_roll(&p, &grid()).cosine_coeff(1), 0.0577350, epsilon = 1e-7);
        let p = RollParameters::new(0.05, 0.5, 1.0).unwrap();
        assert_eq!(asymptotic_roll(&p, &grid()).max_abs(), 0.0);
        let p = RollParameters::new(0.05, 0.0, 1.0).unwrap();
        let u = asymptotic_roll(&p, &grid());
        assert_abs_diff_eq!(u.cosine_coeff(1), 0.06, epsilon = 1e-15);
        assert_abs_diff_eq!(u.cosine_coeff(2), -2.0e-4, epsilon = 1e-15);
    }

    #[test]
    fn amplitude_examples() {
        let p = RollParameters::new(0.1, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(amplitude_a(&p), 0.0133333, epsilon = 1e-7);
        assert_abs_diff_eq!(amplitude_alpha(&p), 0.1154701, epsilon = 1e-7);
        let p = RollParameters::new(0.1, 0.25, 1.0).unwrap();
        assert_abs_diff_eq!(amplitude_a(&p), 0.0106848, epsilon = 1e-7);
        assert_abs_diff_eq!(amplitude_alpha(&p), 0.1033688, epsilon = 1e-7);
        for omega in [-0.5, 0.5] {
            let p = RollParameters::new(0.07, omega, 0.9).unwrap();
            assert_eq!(amplitude_a(&p), 0.0);
            assert_eq!(amplitude_alpha(&p), 0.0);
        }
        // α² ≈ 𝒜 to the retained order
        let p = RollParameters::new(0.01, 0.2, 0.7).unwrap();
        assert!((amplitude_alpha(&p).powi(2) - amplitude_a(&p)).abs() < 1e-7);
    }

    #[test]
    fn solved_roll_contract() {
        let p = RollParameters::new(0.05, 0.25, 1.0).unwrap();
        let roll = solve_roll(&p, &grid(), DEFAULT_TOL).unwrap();
        assert!(roll.residual_norm < 1e-12);
        assert!(roll.profile.is_even());
        assert_eq!(roll.profile.mean(), 0.0);
        assert!(roll.profile.evaluate(0.0) > 0.0);
        assert!(measured_alpha(&roll) > 0.0);
        assert!((measured_alpha(&roll) - amplitude_alpha(&p)).abs() < 10.0 * p.eps.powi(3));
        assert!(roll.q.abs() < 5.0 * p.eps * p.eps);
    }

    #[test]
    fn band_edge_is_trivial() {
        let p = RollParameters::new(0.05, 0.5, 0.0).unwrap();
        let roll = solve_roll(&p, &grid(), DEFAULT_TOL).unwrap();
        assert_eq!(roll.profile.max_abs(), 0.0);
        assert_eq!(measured_alpha(&roll), 0.0);
    }

    #[test]
    fn solve_preconditions() {
        let p = RollParameters::new(0.3, 0.0, 0.0).unwrap();
        assert!(matches!(solve_roll(&p, &grid(), 1e-12), Err(Error::OutOfRange { .. })));
        let p = RollParameters::new(0.05, 0.0, 0.0).unwrap();
        assert!(solve_roll(&p, &grid(), 1e-15).is_err());
    }

    #[test]
    fn second_harmonic_and_grid_robustness() {
        let p = RollParameters::new(0.02, -0.3, 0.8).unwrap();
        let a = solve_roll(&p, &grid(), DEFAULT_TOL).unwrap();
        let b = solve_roll(&p, &SpectralGrid::new(32).unwrap(), DEFAULT_TOL).unwrap();
        for m in 0..=16 {
            assert!((a.profile.coeff(m) - b.profile.coeff(m)).norm() < 1e-11);
        }
        let expected = -2.0 * p.s * p.amplitude_ratio() * p.eps * p.eps;
        assert!((a.profile.cosine_coeff(2) - expected).abs() < 5.0 * p.eps.powi(3));
    }

    #[test]
    fn json_contains_triples() {
        let p = RollParameters::new(0.05, 0.0, 0.5).unwrap();
        let roll = solve_roll(&p, &grid(), DEFAULT_TOL).unwrap();
        let text = serde_json::to_string(&roll).unwrap();
        let back: RollSolution = serde_json::from_str(&text).unwrap();
        assert_eq!(back.profile, roll.profile);
        assert_eq!(back.q, roll.q);
    }
}
