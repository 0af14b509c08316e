//! Truncated Fourier series of real 2π-periodic functions.
//!
//! A field stores the full complex spectrum `c_m`, `|m| ≤ M`, with the reality
//! condition `c_{-m} = conj(c_m)`. Products are evaluated on a zero-padded
//! collocation grid so that quadratic and cubic terms are exact.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Highest retained mode and the matching collocation resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralGrid {
    n_modes: usize,
    n_points: usize,
}

impl SpectralGrid {
    pub const MIN_MODES: usize = 8;

    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes < Self::MIN_MODES {
            return Err(Error::InvalidParameter {
                name: "modes",
                reason: format!("need at least {} modes, got {n_modes}", Self::MIN_MODES),
            });
        }
        Ok(SpectralGrid {
            n_modes,
            n_points: dealiased_points(n_modes),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Number of collocation points, a power of two no smaller than `4M + 1`.
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Length of a coefficient vector, `2M + 1`.
    pub fn len(&self) -> usize {
        2 * self.n_modes + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn collocation_points(&self) -> Vec<f64> {
        (0..self.n_points)
            .map(|j| 2.0 * PI * j as f64 / self.n_points as f64)
            .collect()
    }

    pub fn zeros(&self) -> PeriodicField {
        PeriodicField::zeros(self.n_modes)
    }
}

/// Smallest power of two that resolves cubic products of fields with `n_modes` modes.
pub fn dealiased_points(n_modes: usize) -> usize {
    (4 * n_modes + 1).next_power_of_two().max(8)
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn fft_pair(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

/// Real 2π-periodic function as Fourier coefficients `c_m`, `-M ≤ m ≤ M`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField {
    n_modes: usize,
    coeffs: Vec<Complex64>,
}

impl PeriodicField {
    pub fn zeros(n_modes: usize) -> Self {
        PeriodicField {
            n_modes,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * n_modes + 1],
        }
    }

    pub fn constant(n_modes: usize, value: f64) -> Self {
        let mut f = Self::zeros(n_modes);
        f.coeffs[n_modes] = Complex64::new(value, 0.0);
        f
    }

    /// `amplitude · cos(jξ)`.
    pub fn cosine(n_modes: usize, j: usize, amplitude: f64) -> Self {
        let mut f = Self::zeros(n_modes);
        if j == 0 {
            f.coeffs[n_modes] = Complex64::new(amplitude, 0.0);
        } else if j <= n_modes {
            f.set_pair(j as i64, Complex64::new(amplitude / 2.0, 0.0));
        }
        f
    }

    /// `amplitude · sin(jξ)`.
    pub fn sine(n_modes: usize, j: usize, amplitude: f64) -> Self {
        let mut f = Self::zeros(n_modes);
        if j > 0 && j <= n_modes {
            f.set_pair(j as i64, Complex64::new(0.0, -amplitude / 2.0));
        }
        f
    }

    /// Even field `a_0 + Σ_{m≥1} a_m cos(mξ)` from its cosine coefficients.
    pub fn from_cosine_coeffs(n_modes: usize, cosine: &[f64]) -> Self {
        let mut f = Self::zeros(n_modes);
        for (m, &a) in cosine.iter().enumerate().take(n_modes + 1) {
            if m == 0 {
                f.coeffs[n_modes] = Complex64::new(a, 0.0);
            } else {
                f.set_pair(m as i64, Complex64::new(a / 2.0, 0.0));
            }
        }
        f
    }

    /// Build from the full coefficient vector, checking length and reality.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "coeffs",
                reason: "coefficient vector must have odd length 2M+1".into(),
            });
        }
        let n_modes = (coeffs.len() - 1) / 2;
        let f = PeriodicField { n_modes, coeffs };
        let scale = f.max_abs().max(1.0);
        for m in 0..=n_modes as i64 {
            if (f.coeff(m) - f.coeff(-m).conj()).norm() > 1e-12 * scale {
                return Err(Error::InvalidParameter {
                    name: "coeffs",
                    reason: format!("reality condition c(-m) = conj c(m) fails at m = {m}"),
                });
            }
        }
        Ok(f)
    }

    pub(crate) fn from_coeffs_unchecked(coeffs: Vec<Complex64>) -> Self {
        let n_modes = (coeffs.len() - 1) / 2;
        PeriodicField { n_modes, coeffs }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `e^{imξ}`; zero outside the retained range.
    pub fn coeff(&self, m: i64) -> Complex64 {
        if m.unsigned_abs() as usize > self.n_modes {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(m + self.n_modes as i64) as usize]
        }
    }

    /// Set `c_m = value` and `c_{-m} = conj(value)`.
    pub fn set_pair(&mut self, m: i64, value: Complex64) {
        let n = self.n_modes as i64;
        assert!(m.abs() <= n, "mode {m} outside truncation {n}");
        if m == 0 {
            self.coeffs[n as usize] = Complex64::new(value.re, 0.0);
        } else {
            self.coeffs[(m + n) as usize] = value;
            self.coeffs[(n - m) as usize] = value.conj();
        }
    }

    /// Cosine coefficient `a_m` in `u = a_0 + Σ a_m cos mξ + b_m sin mξ`.
    pub fn cosine_coeff(&self, m: usize) -> f64 {
        if m == 0 {
            self.coeff(0).re
        } else {
            2.0 * self.coeff(m as i64).re
        }
    }

    pub fn sine_coeff(&self, m: usize) -> f64 {
        if m == 0 {
            0.0
        } else {
            -2.0 * self.coeff(m as i64).im
        }
    }

    pub fn mean(&self) -> f64 {
        self.coeff(0).re
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Same function truncated or zero-padded to `n_modes`.
    pub fn resized(&self, n_modes: usize) -> Self {
        let mut out = Self::zeros(n_modes);
        let n = n_modes.min(self.n_modes) as i64;
        for m in -n..=n {
            out.coeffs[(m + n_modes as i64) as usize] = self.coeff(m);
        }
        out
    }

    /// Coefficient map `c_m ↦ f(m) c_m`.
    pub fn map_modes(&self, f: impl Fn(i64) -> Complex64) -> Self {
        let n = self.n_modes as i64;
        let coeffs = (-n..=n).map(|m| f(m) * self.coeff(m)).collect();
        PeriodicField {
            n_modes: self.n_modes,
            coeffs,
        }
    }

    pub fn derivative(&self) -> Self {
        self.map_modes(|m| Complex64::new(0.0, m as f64))
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map_modes(|_| Complex64::new(a, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_grid(self, other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(PeriodicField {
            n_modes: self.n_modes,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Shift `ξ ↦ ξ + π`, i.e. `c_m ↦ (-1)^m c_m`.
    pub fn half_period_shift(&self) -> Self {
        self.map_modes(|m| Complex64::new(if m % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
    }

    pub fn evaluate(&self, xi: f64) -> f64 {
        let n = self.n_modes as i64;
        (-n..=n)
            .map(|m| (self.coeff(m) * Complex64::from_polar(1.0, m as f64 * xi)).re)
            .sum()
    }

    /// Values on `n_points` equispaced nodes `2πj/n_points` (complex, imaginary part is rounding).
    pub fn to_physical_complex(&self, n_points: usize) -> Vec<Complex64> {
        assert!(n_points > 2 * self.n_modes, "too few collocation points");
        let (_, inverse) = fft_pair(n_points);
        let mut buf = vec![Complex64::new(0.0, 0.0); n_points];
        let n = self.n_modes as i64;
        for m in -n..=n {
            buf[m.rem_euclid(n_points as i64) as usize] = self.coeff(m);
        }
        inverse.process(&mut buf);
        buf
    }

    pub fn to_physical(&self, n_points: usize) -> Vec<f64> {
        self.to_physical_complex(n_points).into_iter().map(|z| z.re).collect()
    }

    /// Interpolating coefficients `|m| ≤ n_modes` of real samples on equispaced nodes.
    pub fn from_physical(values: &[f64], n_modes: usize) -> Self {
        let n_points = values.len();
        assert!(n_points > 2 * n_modes, "too few collocation points");
        let (forward, _) = fft_pair(n_points);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        forward.process(&mut buf);
        let inv = 1.0 / n_points as f64;
        let mut out = Self::zeros(n_modes);
        for m in 0..=n_modes as i64 {
            let c = buf[m as usize] * inv;
            out.set_pair(m, c);
        }
        out
    }

    /// Coefficients `|m| ≤ n_out` of `f(u)` for a polynomial `f`, exact when
    /// `degree · M + n_out < n_points`.
    pub fn pointwise(&self, n_out: usize, n_points: usize, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = self.to_physical(n_points).into_iter().map(f).collect();
        Self::from_physical(&values, n_out)
    }

    /// Dealiased product truncated to `n_out` modes.
    pub fn product(&self, other: &Self, n_out: usize) -> Self {
        let n_points = (self.n_modes + other.n_modes + n_out + 1).next_power_of_two().max(8);
        let a = self.to_physical(n_points);
        let b = other.to_physical(n_points);
        let values: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Self::from_physical(&values, n_out)
    }

    /// `[(m, Re c_m, Im c_m)]` for `m = -M..=M`.
    pub fn to_triples(&self) -> Vec<(i64, f64, f64)> {
        let n = self.n_modes as i64;
        (-n..=n)
            .map(|m| {
                let c = self.coeff(m);
                (m, c.re, c.im)
            })
            .collect()
    }

    pub fn from_triples(triples: &[(i64, f64, f64)]) -> Result<Self> {
        let n_modes = triples.iter().map(|t| t.0.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * n_modes + 1];
        for &(m, re, im) in triples {
            coeffs[(m + n_modes as i64) as usize] = Complex64::new(re, im);
        }
        Self::from_coeffs(coeffs)
    }
}

impl Serialize for PeriodicField {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_triples().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PeriodicField {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let triples = Vec::<(i64, f64, f64)>::deserialize(deserializer)?;
        PeriodicField::from_triples(&triples).map_err(D::Error::custom)
    }
}

fn check_grid(a: &PeriodicField, b: &PeriodicField) -> Result<()> {
    if a.n_modes != b.n_modes {
        Err(Error::GridMismatch {
            left: a.n_modes,
            right: b.n_modes,
        })
    } else {
        Ok(())
    }
}

/// Multiplier of `e^{imξ}` under `−k²∂²[−(1+k²∂²)² + ε²]`.
pub fn linear_symbol(m: f64, k: f64, eps: f64) -> f64 {
    let kk = k * k * m * m;
    kk * (-(1.0 - kk).powi(2) + eps * eps)
}

pub fn apply_linear_symbol(f: &PeriodicField, k: f64, eps: f64) -> PeriodicField {
    f.map_modes(|m| {
        if m == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(linear_symbol(m as f64, k, eps), 0.0)
        }
    })
}

/// Full right-hand side `−k²∂²[−(1+k²∂²)²u + ε²u − su² − u³]` with exact products.
pub fn nonlinear_rhs(u: &PeriodicField, s: f64, eps: f64, k: f64) -> PeriodicField {
    let m = u.n_modes();
    let poly = u.pointwise(m, dealiased_points(m), |x| s * x * x + x * x * x);
    let lin = apply_linear_symbol(u, k, eps);
    let mut out = PeriodicField::zeros(m);
    for j in -(m as i64)..=(m as i64) {
        let kk = k * k * (j * j) as f64;
        let idx = (j + m as i64) as usize;
        out.coeffs[idx] = if j == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            lin.coeff(j) - kk * poly.coeff(j)
        };
    }
    out
}

/// `(1/π) ∫₀^{2π} u v dξ`, evaluated from the coefficients.
pub fn inner_product(u: &PeriodicField, v: &PeriodicField) -> Result<f64> {
    check_grid(u, v)?;
    let sum: Complex64 = u.coeffs.iter().zip(&v.coeffs).map(|(a, b)| a * b.conj()).sum();
    Ok(2.0 * sum.re)
}

/// Components of `u` along `cos ξ`, `sin ξ` and the constant: `(⟨cos ξ,u⟩, ⟨sin ξ,u⟩, ½⟨1,u⟩)`.
pub fn project_kernel(u: &PeriodicField) -> (f64, f64, f64) {
    (u.cosine_coeff(1), u.sine_coeff(1), u.mean())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> SpectralGrid {
        SpectralGrid::new(8).unwrap()
    }

    #[test]
    fn grid_resolution() {
        let g = SpectralGrid::new(32).unwrap();
        assert!(g.n_points() > 4 * 32);
        assert!(SpectralGrid::new(7).is_err());
    }

    #[test]
    fn symbol_examples() {
        let m = grid().n_modes();
        let out = apply_linear_symbol(&PeriodicField::cosine(m, 2, 1.0), 1.0, 0.0);
        assert_abs_diff_eq!(out.cosine_coeff(2), -36.0, epsilon = 1e-12);
        let out = apply_linear_symbol(&PeriodicField::cosine(m, 1, 1.0), 1.0, 0.0);
        assert!(out.max_abs() < 1e-15);
        let out = apply_linear_symbol(&PeriodicField::constant(m, 1.0), 1.0, 0.3);
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn rhs_of_small_cosine() {
        let m = grid().n_modes();
        let d = 1e-3;
        let u = PeriodicField::cosine(m, 1, d);
        let out = nonlinear_rhs(&u, 0.0, 0.0, 1.0);
        // −∂²(−u³) on cos ξ: cos³ξ = (3cos ξ + cos 3ξ)/4
        assert_abs_diff_eq!(out.cosine_coeff(1), -0.75 * d * d * d, epsilon = 1e-20);
        assert_abs_diff_eq!(out.cosine_coeff(3), -9.0 * 0.25 * d * d * d, epsilon = 1e-20);
        assert_eq!(out.mean(), 0.0);
        assert!(nonlinear_rhs(&grid().zeros(), 0.7, 0.1, 1.01).max_abs() == 0.0);
    }

    #[test]
    fn inner_product_examples() {
        let m = grid().n_modes();
        let c = PeriodicField::cosine(m, 1, 1.0);
        let s = PeriodicField::sine(m, 1, 1.0);
        let one = PeriodicField::constant(m, 1.0);
        assert_abs_diff_eq!(inner_product(&c, &c).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(inner_product(&c, &s).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(inner_product(&one, &one).unwrap(), 2.0, epsilon = 1e-15);
        assert!(matches!(
            inner_product(&c, &PeriodicField::zeros(9)),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn kernel_projection_examples() {
        let m = grid().n_modes();
        let u = PeriodicField::cosine(m, 1, 3.0)
            .add(&PeriodicField::constant(m, 2.0))
            .unwrap();
        assert_eq!(project_kernel(&u), (3.0, 0.0, 2.0));
        assert_eq!(project_kernel(&PeriodicField::cosine(m, 2, 1.0)), (0.0, 0.0, 0.0));
        let (a, b, c) = project_kernel(&PeriodicField::sine(m, 1, 1.0));
        assert_eq!((a, b, c), (0.0, 1.0, 0.0));
    }

    #[test]
    fn parseval_matches_trapezoid() {
        let m = 8;
        let u = PeriodicField::from_cosine_coeffs(m, &[0.3, 1.0, -0.5, 0.25])
            .add(&PeriodicField::sine(m, 2, 0.7))
            .unwrap();
        let v = PeriodicField::from_cosine_coeffs(m, &[-1.0, 0.2, 0.0, 0.0, 0.4])
            .add(&PeriodicField::sine(m, 1, -0.3))
            .unwrap();
        let n = dealiased_points(m);
        let (a, b) = (u.to_physical(n), v.to_physical(n));
        let quad: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() * 2.0 / n as f64;
        assert_abs_diff_eq!(inner_product(&u, &v).unwrap(), quad, epsilon = 1e-12);
    }

    #[test]
    fn cubic_is_exact() {
        // (cos ξ + sin 2ξ)³ expanded by hand
        let m = 8;
        let u = PeriodicField::cosine(m, 1, 1.0)
            .add(&PeriodicField::sine(m, 2, 1.0))
            .unwrap();
        let cube = u.pointwise(m, dealiased_points(m), |x| x * x * x);
        let n = 64;
        let xs: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        let exact: Vec<f64> = xs
            .iter()
            .map(|&x| {
                let (c, s2) = (x.cos(), (2.0 * x).sin());
                c * c * c + 3.0 * c * c * s2 + 3.0 * c * s2 * s2 + s2 * s2 * s2
            })
            .collect();
        let from_exact = PeriodicField::from_physical(&exact, m);
        for j in -8..=8 {
            assert_abs_diff_eq!(cube.coeff(j).re, from_exact.coeff(j).re, epsilon = 1e-12);
            assert_abs_diff_eq!(cube.coeff(j).im, from_exact.coeff(j).im, epsilon = 1e-12);
        }
    }

    #[test]
    fn symbol_equals_composed_derivatives() {
        let m = 8;
        let (k, eps) = (1.07, 0.2);
        let u = PeriodicField::from_cosine_coeffs(m, &[0.0, 0.5, -0.2, 0.1, 0.05])
            .add(&PeriodicField::sine(m, 3, 0.3))
            .unwrap();
        let d2 = |f: &PeriodicField| f.derivative().derivative().scale(k * k);
        // −(1 + k²∂²)²u + ε²u
        let w = u.add(&d2(&u)).unwrap();
        let w = w.add(&d2(&w)).unwrap();
        let inner = w.scale(-1.0).add(&u.scale(eps * eps)).unwrap();
        let expected = d2(&inner).scale(-1.0);
        let got = apply_linear_symbol(&u, k, eps);
        for j in -8..=8 {
            assert!((got.coeff(j) - expected.coeff(j)).norm() < 1e-10);
        }
    }

    #[test]
    fn json_round_trip() {
        let u = PeriodicField::from_cosine_coeffs(8, &[0.0, 0.1, 0.02]);
        let text = serde_json::to_string(&u).unwrap();
        let back: PeriodicField = serde_json::from_str(&text).unwrap();
        assert_eq!(u, back);
        assert!(serde_json::from_str::<PeriodicField>("[[1, 1.0, 0.0]]").is_err());
    }

    #[test]
    fn half_shift_and_evaluate() {
        let u = PeriodicField::from_cosine_coeffs(8, &[0.0, 1.0, 0.5]);
        assert_abs_diff_eq!(u.evaluate(0.0), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(u.half_period_shift().evaluate(0.0), -0.5, epsilon = 1e-15);
    }
}
