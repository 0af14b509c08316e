//! The modified Ginzburg–Landau amplitude system coupling the roll envelope `A`
//! to the conserved mean mode `B`, and its linear dispersion relation.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bloch::{assemble_bloch, bloch_spectrum};
use crate::error::{require_finite, Error, Result};
use crate::fourier::{fft_pair, SpectralGrid};
use crate::linalg::{eigenvalues3, sort_desc};
use crate::reduced::SmallSigmaExpansion;
use crate::roll::RollSolution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MglParameters {
    pub omega: f64,
    pub s: f64,
}

impl MglParameters {
    pub fn new(omega: f64, s: f64) -> Result<Self> {
        require_finite("omega", omega)?;
        require_finite("s", s)?;
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
        Ok(MglParameters { omega, s })
    }

    fn ratio(&self) -> f64 {
        (1.0 - 4.0 * self.omega * self.omega) / (27.0 - 2.0 * self.s * self.s)
    }

    /// Modulus of the stationary wave train `A = A₀ e^{iωx̂}`.
    pub fn amplitude(&self) -> f64 {
        6.0 * self.ratio().max(0.0).sqrt()
    }

    /// Coefficient `(27 − 2s²)/36` of the cubic term.
    pub fn cubic_coefficient(&self) -> f64 {
        (27.0 - 2.0 * self.s * self.s) / 36.0
    }
}

/// Positive root of `(1 − 4ω²)α − ((27−2s²)/36)α³ = 0`, or 0 at `|ω| = 1/2`.
pub fn mgl_roll_amplitude(omega: f64, s: f64) -> f64 {
    let w = 1.0 - 4.0 * omega * omega;
    if w <= 0.0 {
        0.0
    } else {
        (36.0 * w / (27.0 - 2.0 * s * s)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MglDispersion {
    pub sigma_hat: f64,
    pub matrix: [[Complex64; 3]; 3],
    /// Sorted by descending real part.
    pub eigenvalues: [Complex64; 3],
}

/// Linearization about the stationary wave train acting on `(Re a, −Im a, B)`
/// perturbations `∝ e^{iσ̂x̂}`.
pub fn mgl_dispersion_matrix(p: &MglParameters, sigma_hat: f64) -> MglDispersion {
    let w = p.omega;
    let r = p.ratio().sqrt();
    let x = sigma_hat;
    let z = |re: f64, im: f64| Complex64::new(re, im);
    let matrix = [
        [
            z(-4.0 * x * x - 2.0 * (1.0 - 4.0 * w * w), 0.0),
            z(0.0, 8.0 * w * x),
            z(-12.0 * p.s * r, 0.0),
        ],
        [z(0.0, -8.0 * w * x), z(-4.0 * x * x, 0.0), z(0.0, 0.0)],
        [z(-6.0 * p.s * r * x * x, 0.0), z(0.0, 0.0), z(-x * x, 0.0)],
    ];
    let mut eigenvalues = eigenvalues3(&matrix);
    sort_desc(&mut eigenvalues);
    MglDispersion {
        sigma_hat,
        matrix,
        eigenvalues,
    }
}

/// Small-`σ̂` curvatures obtained by eliminating the amplitude direction.
///
/// The `(1,1)` entry stays `O(1)` as `σ̂ → 0` while the rest is `O(σ̂)`, so the
/// two slow eigenvalues are those of the Schur complement, whose `σ̂²`
/// coefficient is a fixed 2×2 matrix.
pub fn mgl_small_sigma(p: &MglParameters) -> Result<SmallSigmaExpansion> {
    if p.omega.abs() == 0.5 {
        return Err(Error::DegenerateBand { omega: p.omega });
    }
    let w = p.omega;
    let r = p.ratio().sqrt();
    // σ̂-expansion coefficients of the entries
    let m11_0 = -2.0 * (1.0 - 4.0 * w * w);
    let m11_2 = -4.0;
    let m12_m21 = 64.0 * w * w; // (8iω)(−8iω), coefficient of σ̂²
    let m13_m31 = 72.0 * p.s * p.s * r * r; // (−12s√A)(−6s√A), coefficient of σ̂²
    let lambda1 = m11_2 + (m12_m21 + m13_m31) / m11_0;
    let e22 = -4.0 - m12_m21 / m11_0;
    let e33 = -1.0 - m13_m31 / m11_0;
    let e23_e32 = m12_m21 * m13_m31 / (m11_0 * m11_0);
    let tr = e22 + e33;
    let det = e22 * e33 - e23_e32;
    let root = (tr * tr - 4.0 * det).sqrt();
    Ok(SmallSigmaExpansion {
        lambda1_curvature: lambda1,
        lambda_minus: (tr - root) / 2.0,
        lambda_plus: (tr + root) / 2.0,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComparisonRow {
    pub sigma_hat: f64,
    /// Critical Bloch eigenvalues divided by `ε²`, descending real part.
    pub exact: [Complex64; 3],
    pub mgl: [Complex64; 3],
    pub deviation: f64,
}

/// Exact critical eigenvalues at `σ = εσ̂` rescaled by `1/ε²` next to the mGL eigenvalues at `σ̂`.
pub fn compare_exact_vs_mgl(
    roll: &RollSolution,
    sigma_hat_grid: &[f64],
    grid: &SpectralGrid,
    delta: f64,
) -> Result<Vec<ComparisonRow>> {
    let p = roll.params;
    let eps = p.eps;
    if !(eps > 0.0) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            range: "(0, 0.2]",
        });
    }
    let mp = MglParameters::new(p.omega, p.s)?;
    for &sh in sigma_hat_grid {
        require_finite("sigma_hat", sh)?;
        if (eps * sh).abs() > 0.5 {
            return Err(Error::OutOfRange {
                name: "sigma_hat",
                value: sh,
                range: "|eps * sigma_hat| <= 1/2",
            });
        }
    }
    sigma_hat_grid
        .par_iter()
        .map(|&sh| {
            let sp = bloch_spectrum(&assemble_bloch(roll, eps * sh, grid)?, delta)?;
            let mut exact = sp.critical_values().map(|z| z / (eps * eps));
            sort_desc(&mut exact);
            let mgl = mgl_dispersion_matrix(&mp, sh).eigenvalues;
            let deviation = (0..3).map(|j| (exact[j] - mgl[j]).norm()).fold(0.0, f64::max);
            Ok(ComparisonRow {
                sigma_hat: sh,
                exact,
                mgl,
                deviation,
            })
        })
        .collect()
}

/// Right-hand side of the amplitude system on a periodic slow domain of length
/// `length`, from nodal values of `A` and `B`.
pub fn mgl_rhs(a: &[Complex64], b: &[f64], length: f64, s: f64) -> Result<(Vec<Complex64>, Vec<f64>)> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    let g = (27.0 - 2.0 * s * s) / 36.0;
    let a_xx = second_derivative(a, length);
    let b_c: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let b_xx = second_derivative(&b_c, length);
    let mod2: Vec<Complex64> = a.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
    let mod2_xx = second_derivative(&mod2, length);
    let da = (0..n)
        .map(|j| 4.0 * a_xx[j] + a[j] - g * a[j].norm_sqr() * a[j] - 2.0 * s * a[j] * b[j])
        .collect();
    let db = (0..n).map(|j| b_xx[j].re + 0.5 * s * mod2_xx[j].re).collect();
    Ok((da, db))
}

/// Wavenumber of FFT bin `j` on a periodic domain of `n` points and length `length`.
pub(crate) fn wavenumber(j: usize, n: usize, length: f64) -> f64 {
    let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
    2.0 * std::f64::consts::PI * m / length
}

fn second_derivative(values: &[Complex64], length: f64) -> Vec<Complex64> {
    let n = values.len();
    let (forward, inverse) = fft_pair(n);
    let mut buf = values.to_vec();
    forward.process(&mut buf);
    for (j, c) in buf.iter_mut().enumerate() {
        let kappa = if 2 * j == n { 0.0 } else { wavenumber(j, n, length) };
        *c *= -kappa * kappa / n as f64;
    }
    inverse.process(&mut buf);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduced::small_sigma_expansion;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn amplitude_examples() {
        assert_abs_diff_eq!(mgl_roll_amplitude(0.0, 0.0), 1.1547005, epsilon = 1e-7);
        assert_eq!(mgl_roll_amplitude(0.5, 1.0), 0.0);
        let p = MglParameters::new(0.3, 0.8).unwrap();
        assert_abs_diff_eq!(p.amplitude(), mgl_roll_amplitude(0.3, 0.8), epsilon = 1e-15);
        // gA₀² = 1 − 4ω²
        assert_abs_diff_eq!(
            p.cubic_coefficient() * p.amplitude().powi(2),
            1.0 - 0.36,
            epsilon = 1e-14
        );
        assert!(MglParameters::new(0.6, 0.0).is_err());
    }

    #[test]
    fn dispersion_examples() {
        let p = MglParameters::new(0.2, 0.7).unwrap();
        let d = mgl_dispersion_matrix(&p, 0.0);
        let ev: Vec<f64> = d.eigenvalues.iter().map(|z| z.re).collect();
        assert_abs_diff_eq!(ev[2], -2.0 * (1.0 - 0.16), epsilon = 1e-14);
        assert!(ev[0].abs() < 1e-14 && ev[1].abs() < 1e-14);
        let (a, b) = (mgl_dispersion_matrix(&p, 0.1), mgl_dispersion_matrix(&p, -0.1));
        for j in 0..3 {
            assert!((a.eigenvalues[j] - b.eigenvalues[j].conj()).norm() < 1e-13);
        }
        let q = MglParameters::new(0.0, 0.0).unwrap();
        let d = mgl_dispersion_matrix(&q, 0.01);
        assert_abs_diff_eq!(d.eigenvalues[0].re, -1e-4, epsilon = 1e-8);
        assert_abs_diff_eq!(d.eigenvalues[1].re, -4e-4, epsilon = 1e-8);
    }

    #[test]
    fn eigen_residuals() {
        let p = MglParameters::new(-0.3, 1.1).unwrap();
        for sh in [0.05, 0.4, 1.3] {
            let d = mgl_dispersion_matrix(&p, sh);
            for l in d.eigenvalues {
                let m = d.matrix;
                let a = |i: usize, j: usize| if i == j { m[i][j] - l } else { m[i][j] };
                let row = |i: usize| [a(i, 0), a(i, 1), a(i, 2)];
                let cross = |r: [Complex64; 3], t: [Complex64; 3]| {
                    [
                        r[1] * t[2] - r[2] * t[1],
                        r[2] * t[0] - r[0] * t[2],
                        r[0] * t[1] - r[1] * t[0],
                    ]
                };
                let norm = |v: &[Complex64; 3]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let v = [cross(row(0), row(1)), cross(row(0), row(2)), cross(row(1), row(2))]
                    .into_iter()
                    .max_by(|x, y| norm(x).total_cmp(&norm(y)))
                    .unwrap();
                let scale = norm(&v);
                let residual = (0..3)
                    .map(|i| (0..3).map(|j| a(i, j) * v[j]).sum::<Complex64>().norm())
                    .fold(0.0, f64::max);
                assert!(residual / scale < 1e-12);
            }
        }
    }

    #[test]
    fn small_sigma_agrees_with_reduced_closed_form() {
        let e = mgl_small_sigma(&MglParameters::new(0.0, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(e.lambda1_curvature, -4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.lambda_minus, -4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.lambda_plus, -1.0, epsilon = 1e-14);
        assert!(mgl_small_sigma(&MglParameters::new(0.5, 0.0).unwrap()).is_err());
    }

    #[test]
    fn stationary_train_and_conservation() {
        let n = 64;
        let length = 8.0 * PI;
        for (omega, s) in [(0.0, 0.0), (0.25, 1.0), (-0.25, -0.8), (0.5, 2.0)] {
            let a0 = mgl_roll_amplitude(omega, s);
            let xs: Vec<f64> = (0..n).map(|j| length * j as f64 / n as f64).collect();
            let a: Vec<Complex64> = xs.iter().map(|&x| Complex64::from_polar(a0, omega * x)).collect();
            let b = vec![0.0; n];
            let (da, db) = mgl_rhs(&a, &b, length, s).unwrap();
            let worst = da
                .iter()
                .map(|z| z.norm())
                .chain(db.iter().map(|v| v.abs()))
                .fold(0.0, f64::max);
            assert!(worst < 1e-12, "omega {omega} s {s}: {worst}");
        }
        let (da, db) = mgl_rhs(&vec![Complex64::new(0.0, 0.0); 16], &[0.7; 16], 10.0, 0.5).unwrap();
        assert!(da.iter().all(|z| z.norm() == 0.0) && db.iter().all(|v| v.abs() < 1e-15));
        let a: Vec<Complex64> = (0..32)
            .map(|j| Complex64::new((j as f64 * 0.3).sin(), (j as f64).cos() * 0.2))
            .collect();
        let b: Vec<f64> = (0..32).map(|j| (j as f64 * 0.7).cos()).collect();
        let (_, db) = mgl_rhs(&a, &b, 12.0, 0.9).unwrap();
        assert!(db.iter().sum::<f64>().abs() < 1e-13);
        assert!(mgl_rhs(&a, &b[..8], 12.0, 0.9).is_err());
    }

    #[test]
    fn curvature_fit_recovers_closed_form() {
        let p = MglParameters::new(0.15, 0.6).unwrap();
        let e = mgl_small_sigma(&p).unwrap();
        let xs: Vec<f64> = (1..=10).map(|j| 0.002 * j as f64).collect();
        let mut curves = [vec![], vec![], vec![]];
        for &x in &xs {
            let d = mgl_dispersion_matrix(&p, x);
            for (curve, z) in curves.iter_mut().zip(d.eigenvalues) {
                curve.push(z.re);
            }
        }
        let fit = |ys: &[f64]| crate::linalg::polyfit(&xs, ys, &[0, 2, 4])[1];
        assert!((fit(&curves[0]) - e.lambda_plus).abs() < 1e-6);
        assert!((fit(&curves[1]) - e.lambda_minus).abs() < 1e-6);
        assert!((fit(&curves[2]) - e.lambda1_curvature).abs() < 1e-6);
        let r = small_sigma_expansion(0.15, 0.6).unwrap();
        assert_abs_diff_eq!(r.lambda_plus, e.lambda_plus, epsilon = 1e-12);
    }
}
