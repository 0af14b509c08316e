//! Reduced 3×3 dispersion relations near σ = 0 and stability classification.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bloch::{assemble_bloch, bloch_spectrum};
use crate::error::{require_finite, Error, Result};
use crate::fourier::SpectralGrid;
use crate::linalg::{eigenvalues3, polyfit, sort_desc};
use crate::roll::{RollParameters, RollSolution};

pub use crate::linalg::companion_roots;

/// Half-width of the band `|Π| < BOUNDARY_BAND` classified as marginal.
pub const BOUNDARY_BAND: f64 = 1e-9;

fn i(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `c(ε) = −2(1−4ω²)ε²`.
pub fn c_eps(p: &RollParameters) -> f64 {
    -2.0 * (1.0 - 4.0 * p.omega * p.omega) * p.eps * p.eps
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReducedMatrix {
    pub params: RollParameters,
    pub sigma: f64,
    pub entries: [[Complex64; 3]; 3],
}

impl ReducedMatrix {
    /// Eigenvalues sorted by descending real part.
    pub fn eigenvalues(&self) -> [Complex64; 3] {
        let mut ev = eigenvalues3(&self.entries);
        sort_desc(&mut ev);
        ev
    }
}

/// Leading-order reduced matrix on the critical modes `(cos ξ, sin ξ, 1)`.
pub fn leading_reduced_matrix(p: &RollParameters, sigma: f64) -> ReducedMatrix {
    let (eps, w, s) = (p.eps, p.omega, p.s);
    let root_a = p.amplitude_ratio().sqrt();
    let c = c_eps(p);
    let s2 = sigma * sigma;
    let entries = [
        [
            re(-4.0 * s2 + c),
            i(8.0 * w * sigma * eps),
            re(-12.0 * s * root_a * eps),
        ],
        [i(-8.0 * w * sigma * eps), re(-4.0 * s2), re(0.0)],
        [re(-6.0 * s * root_a * s2 * eps), re(0.0), re(-s2)],
    ];
    ReducedMatrix {
        params: *p,
        sigma,
        entries,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicCoefficients {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

/// Coefficients of the monic characteristic cubic `λ³ + a₂λ² + a₁λ + a₀` at leading order.
pub fn cubic_coefficients(p: &RollParameters, sigma: f64) -> CubicCoefficients {
    let c = c_eps(p);
    let (w2, s2, e2) = (p.omega * p.omega, p.s * p.s, p.eps * p.eps);
    let a = p.amplitude_ratio();
    let x = sigma * sigma;
    CubicCoefficients {
        a2: -c + 9.0 * x,
        a1: 24.0 * x * x - 5.0 * c * x - 72.0 * s2 * a * x * e2 - 64.0 * w2 * x * e2,
        a0: 16.0 * x * x * x - 4.0 * c * x * x - 64.0 * w2 * x * x * e2 - 288.0 * s2 * a * x * x * e2,
    }
}

/// A monic real cubic with its Cardano intermediates and roots.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReducedCubic {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
    pub q: f64,
    pub r: f64,
    pub b: f64,
    pub d: f64,
    pub roots: [Complex64; 3],
}

impl ReducedCubic {
    /// `Q³ + R²`; non-negative exactly when there is a complex pair (or a repeated root).
    pub fn discriminant(&self) -> f64 {
        self.q.powi(3) + self.r * self.r
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        ((z + self.a2) * z + self.a1) * z + self.a0
    }
}

/// Roots by Cardano's formulas.
///
/// With `s₁, s₂` the cube roots of `R ± √(Q³+R²)` (`s₁s₂ = −Q`), `B = s₁ + s₂`
/// and `D = s₁² + s₂²`, the roots are `−a₂/3 + B` and
/// `(−2a₂/3 − B ± √(B² − 4(D+Q)))/2`. The radicand is evaluated in the
/// equivalent form `−3(s₁ − s₂)²` to avoid cancellation.
pub fn cardano_roots(a2: f64, a1: f64, a0: f64) -> ReducedCubic {
    let q = (3.0 * a1 - a2 * a2) / 9.0;
    let r = (9.0 * a2 * a1 - 27.0 * a0 - 2.0 * a2.powi(3)) / 54.0;
    let disc = q.powi(3) + r * r;
    let (s1, s2) = if disc >= 0.0 {
        let t = r + r.signum() * disc.sqrt();
        let t = if r == 0.0 { disc.sqrt() } else { t };
        let s1 = t.cbrt();
        let s2 = if s1 != 0.0 { -q / s1 } else { 0.0 };
        (re(s1), re(s2))
    } else {
        let s1 = Complex64::new(r, (-disc).sqrt()).cbrt();
        (s1, s1.conj())
    };
    let b = (s1 + s2).re;
    let d = (s1 * s1 + s2 * s2).re;
    let radicand = (s1 - s2).powi(2) * -3.0;
    let root = radicand.sqrt();
    let base = re(-2.0 * a2 / 3.0 - b);
    let roots = [re(-a2 / 3.0 + b), (base + root) * 0.5, (base - root) * 0.5];
    ReducedCubic {
        a2,
        a1,
        a0,
        q,
        r,
        b,
        d,
        roots,
    }
}

/// Leading parts of the expansions `a₀ = P₀₄σ⁴ + …`, `a₁ = P₁₂σ² + P₁₄σ⁴`, `a₂ = P₂₀ + P₂₂σ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PSymbols {
    pub p04: f64,
    pub p12: f64,
    pub p14: f64,
    pub p20: f64,
    pub p22: f64,
}

impl PSymbols {
    /// Leading `σ⁴` coefficient of `Q³ + R²`: `−P₂₀²P₁₂²/108 + P₂₀³P₀₄/27`.
    pub fn discriminant_sigma4(&self) -> f64 {
        -self.p20.powi(2) * self.p12.powi(2) / 108.0 + self.p20.powi(3) * self.p04 / 27.0
    }
}

/// The σ-independent leading P-symbols.
pub fn p_symbols(p: &RollParameters) -> PSymbols {
    let c = c_eps(p);
    let e2 = p.eps * p.eps;
    let (w2, s2) = (p.omega * p.omega, p.s * p.s);
    let a = p.amplitude_ratio();
    PSymbols {
        p04: -4.0 * c - 64.0 * w2 * e2 - 288.0 * s2 * a * e2,
        p12: -5.0 * c - 72.0 * s2 * a * e2 - 64.0 * w2 * e2,
        p14: 24.0,
        p20: -c,
        p22: 9.0,
    }
}

fn check_band(omega: f64, s: f64) -> Result<()> {
    require_finite("omega", omega)?;
    require_finite("s", s)?;
    if omega.abs() == 0.5 {
        return Err(Error::DegenerateBand { omega });
    }
    if omega.abs() > 0.5 {
        return Err(Error::OutOfRange {
            name: "omega",
            value: omega,
            range: "(-1/2, 1/2)",
        });
    }
    if 27.0 - 2.0 * s * s <= 0.0 {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            range: "(-sqrt(27/2), sqrt(27/2))",
        });
    }
    Ok(())
}

/// `T = −5 + 36s²/(27−2s²) + 32ω²/(1−4ω²)`, the sum of the two diffusive curvatures.
pub fn band_trace(omega: f64, s: f64) -> f64 {
    let w2 = omega * omega;
    -5.0 + 36.0 * s * s / (27.0 - 2.0 * s * s) + 32.0 * w2 / (1.0 - 4.0 * w2)
}

/// `Π = 4 − 144s²/(27−2s²) − 32ω²/(1−4ω²)`, the product of the two diffusive curvatures.
pub fn band_product(omega: f64, s: f64) -> f64 {
    let w2 = omega * omega;
    4.0 - 144.0 * s * s / (27.0 - 2.0 * s * s) - 32.0 * w2 / (1.0 - 4.0 * w2)
}

/// Half-width of the stable band `ω² < (27−38s²)/(12(27−14s²))`, if non-empty.
pub fn stable_band_half_width(s: f64) -> Option<f64> {
    let num = 27.0 - 38.0 * s * s;
    if num <= 0.0 {
        None
    } else {
        Some((num / (12.0 * (27.0 - 14.0 * s * s))).sqrt())
    }
}

/// Curvatures of the critical eigenvalues in `λ ≈ c σ²` for small σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallSigmaExpansion {
    pub lambda1_curvature: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
}

pub fn small_sigma_expansion(omega: f64, s: f64) -> Result<SmallSigmaExpansion> {
    check_band(omega, s)?;
    let w2 = omega * omega;
    let t = band_trace(omega, s);
    let pi = band_product(omega, s);
    let root = (t * t - 4.0 * pi).sqrt();
    Ok(SmallSigmaExpansion {
        lambda1_curvature: -36.0 * s * s / (27.0 - 2.0 * s * s) - 4.0 * (1.0 + 4.0 * w2) / (1.0 - 4.0 * w2),
        lambda_minus: (t - root) / 2.0,
        lambda_plus: (t + root) / 2.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
    Boundary,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Boundary => "boundary",
        }
    }
}

/// Closed-form classification from the sign of `Π`.
pub fn stability_predicate(omega: f64, s: f64) -> Result<Verdict> {
    check_band(omega, s).map_err(|e| match e {
        Error::DegenerateBand { omega } => Error::OutOfRange {
            name: "omega",
            value: omega,
            range: "(-1/2, 1/2)",
        },
        other => other,
    })?;
    let pi = band_product(omega, s);
    Ok(if pi.abs() < BOUNDARY_BAND {
        Verdict::Boundary
    } else if pi > 0.0 {
        Verdict::Stable
    } else {
        Verdict::Unstable
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct StabilityVerdict {
    pub eps: f64,
    pub omega: f64,
    pub s: f64,
    pub verdict: Verdict,
    pub witness_sigma: Option<f64>,
    pub witness_lambda: Option<Complex64>,
}

/// Bloch numbers scanned by default: geometric in `σ/ε` near zero, then linear up to 1/2.
pub fn default_sigma_grid(eps: f64) -> Vec<f64> {
    let mut out: Vec<f64> = (0..22).map(|k| 0.02 * 1.25f64.powi(k) * eps).collect();
    out.extend((0..8).map(|k| 0.06 + (0.48 - 0.06) * k as f64 / 7.0));
    out.retain(|&s| s <= 0.5);
    out
}

/// Relative margin (times ε²) above which a positive eigenvalue counts as growth.
pub const GROWTH_MARGIN: f64 = 1e-8;
/// Stable rolls need diffusive curvatures at most `−CURVATURE_MARGIN·ε²`.
pub const CURVATURE_MARGIN: f64 = 1e-6;

/// Classifies a roll from its Bloch spectra over `sigma_grid`.
pub fn classify_numerically(
    roll: &RollSolution,
    sigma_grid: &[f64],
    grid: &SpectralGrid,
    delta: f64,
) -> Result<StabilityVerdict> {
    let p = roll.params;
    let eps = p.eps;
    let scan = sigma_grid
        .par_iter()
        .map(|&s| bloch_spectrum(&assemble_bloch(roll, s, grid)?, delta))
        .collect::<Result<Vec<_>>>()?;
    let mut witness: Option<(f64, Complex64)> = None;
    for sp in &scan {
        for z in sp.critical_values() {
            if witness.is_none_or(|w| z.re > w.1.re) {
                witness = Some((sp.sigma, z));
            }
        }
    }
    let margin = GROWTH_MARGIN * eps * eps;
    let mut out = StabilityVerdict {
        eps,
        omega: p.omega,
        s: p.s,
        verdict: Verdict::Boundary,
        witness_sigma: witness.map(|w| w.0),
        witness_lambda: witness.map(|w| w.1),
    };
    if witness.is_some_and(|w| w.1.re > margin) {
        out.verdict = Verdict::Unstable;
        return Ok(out);
    }
    let curvatures = diffusive_curvatures(roll, grid, delta)?;
    if curvatures.iter().all(|&c| c <= -CURVATURE_MARGIN * eps * eps) {
        out.verdict = Verdict::Stable;
    }
    Ok(out)
}

/// Fitted `σ²` coefficients of the two critical curves through zero at `σ = 0`.
pub fn diffusive_curvatures(roll: &RollSolution, grid: &SpectralGrid, delta: f64) -> Result<[f64; 2]> {
    let eps = roll.params.eps;
    let sigmas: Vec<f64> = (1..=6).map(|j| 0.02 * j as f64 * eps).collect();
    let curves = sigmas
        .iter()
        .map(|&s| {
            let sp = bloch_spectrum(&assemble_bloch(roll, s, grid)?, delta)?;
            let mut v: Vec<f64> = sp.critical_values().iter().map(|z| z.re).collect();
            v.sort_by(f64::total_cmp);
            Ok([v[1], v[2]])
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = |j: usize| {
        let ys: Vec<f64> = curves.iter().map(|c| c[j]).collect();
        polyfit(&sigmas, &ys, &[0, 2, 4])[1]
    };
    Ok([fit(0), fit(1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roll::{solve_roll, DEFAULT_TOL};
    use approx::assert_abs_diff_eq;

    fn params(eps: f64, omega: f64, s: f64) -> RollParameters {
        RollParameters::new(eps, omega, s).unwrap()
    }

    #[test]
    fn matrix_at_zero_sigma() {
        let p = params(0.05, 0.2, 0.9);
        let m = leading_reduced_matrix(&p, 0.0);
        let mut ev: Vec<f64> = m.eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(ev[0], c_eps(&p), epsilon = 1e-15);
        assert!(ev[1].abs() < 1e-15 && ev[2].abs() < 1e-15);
        let m = leading_reduced_matrix(&params(0.05, 0.2, 0.0), 0.1);
        assert_eq!(m.entries[0][2], re(0.0));
        assert_eq!(m.entries[2][0], re(0.0));
    }

    #[test]
    fn matrix_parity() {
        let p = params(0.07, -0.3, 1.1);
        let (a, b) = (leading_reduced_matrix(&p, 0.13), leading_reduced_matrix(&p, -0.13));
        for r in 0..3 {
            for c in 0..3 {
                let odd = (r, c) == (0, 1) || (r, c) == (1, 0);
                if odd {
                    assert_eq!(a.entries[r][c], -b.entries[r][c]);
                    assert_eq!(a.entries[r][c].re, 0.0);
                } else {
                    assert_eq!(a.entries[r][c], b.entries[r][c]);
                    assert_eq!(a.entries[r][c].im, 0.0);
                }
            }
        }
    }

    #[test]
    fn cubic_examples() {
        let p = params(0.05, 0.1, 0.5);
        let c = cubic_coefficients(&p, 0.0);
        assert_eq!((c.a1, c.a0), (0.0, 0.0));
        assert_eq!(c.a2, -c_eps(&p));
        let c = cubic_coefficients(&params(0.0, 0.1, 0.5), 0.1);
        assert_abs_diff_eq!(c.a2, 0.09, epsilon = 1e-15);
        assert_abs_diff_eq!(c.a1, 2.4e-3, epsilon = 1e-15);
        assert_abs_diff_eq!(c.a0, 1.6e-5, epsilon = 1e-17);
    }

    #[test]
    fn cardano_examples() {
        let cubic = cardano_roots(6.0, 11.0, 6.0);
        let mut r: Vec<f64> = cubic.roots.iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        for (a, b) in r.iter().zip([-3.0, -2.0, -1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        let c = -0.01;
        let cubic = cardano_roots(-c, 0.0, 0.0);
        let mut r: Vec<f64> = cubic.roots.iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(r[0], c, epsilon = 1e-15);
        assert!(r[1].abs() < 1e-15 && r[2].abs() < 1e-15);
        // complex pair: (λ − 1)(λ² + 2λ + 5)
        let cubic = cardano_roots(1.0, 3.0, -5.0);
        assert!(cubic.discriminant() > 0.0);
        for z in cubic.roots {
            assert!(cubic.evaluate(z).norm() < 1e-12);
        }
    }

    #[test]
    fn p_symbol_examples() {
        let p = params(0.06, 0.2, 0.9);
        let ps = p_symbols(&p);
        for sigma in [0.01, 0.05, 0.2] {
            let c = cubic_coefficients(&p, sigma);
            let x = sigma * sigma;
            assert_abs_diff_eq!(c.a1, ps.p12 * x + ps.p14 * x * x, epsilon = 1e-12);
            assert_abs_diff_eq!(c.a2, ps.p20 + ps.p22 * x, epsilon = 1e-12);
        }
        assert_eq!(p_symbols(&params(0.1, 0.5, 1.0)).p20, 0.0);
        let zero = p_symbols(&params(0.0, 0.3, 1.0));
        assert_eq!(
            (zero.p04, zero.p12, zero.p14, zero.p20, zero.p22),
            (0.0, 0.0, 24.0, 0.0, 9.0)
        );
    }

    #[test]
    fn expansion_examples() {
        let e = small_sigma_expansion(0.0, 0.0).unwrap();
        assert_abs_diff_eq!(e.lambda1_curvature, -4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.lambda_minus, -4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.lambda_plus, -1.0, epsilon = 1e-14);
        let e = small_sigma_expansion(0.0, 0.5).unwrap();
        assert_abs_diff_eq!(e.lambda1_curvature, -4.3396, epsilon = 1e-4);
        assert_abs_diff_eq!(e.lambda_plus, -0.6604, epsilon = 1e-4);
        assert_abs_diff_eq!(e.lambda_minus, -4.0, epsilon = 1e-4);
        assert_abs_diff_eq!(e.lambda_plus * e.lambda_minus, band_product(0.0, 0.5), epsilon = 1e-12);
        let s_star = (27.0f64 / 38.0).sqrt();
        assert!(small_sigma_expansion(0.0, s_star).unwrap().lambda_plus.abs() < 1e-12);
        assert!(matches!(
            small_sigma_expansion(0.5, 0.0),
            Err(Error::DegenerateBand { .. })
        ));
    }

    #[test]
    fn predicate_examples() {
        assert_eq!(stability_predicate(0.0, 0.0).unwrap(), Verdict::Stable);
        assert_eq!(stability_predicate(0.4, 0.0).unwrap(), Verdict::Unstable);
        assert_eq!(stability_predicate(0.0, 1.2).unwrap(), Verdict::Unstable);
        let s_star = (27.0f64 / 38.0).sqrt();
        assert_abs_diff_eq!(s_star, 0.8429272, epsilon = 1e-7);
        assert_eq!(stability_predicate(0.0, s_star).unwrap(), Verdict::Boundary);
        let w_star = stable_band_half_width(0.0).unwrap();
        assert_abs_diff_eq!(w_star, 0.2886751, epsilon = 1e-7);
        assert_eq!(stability_predicate(w_star, 0.0).unwrap(), Verdict::Boundary);
        assert!(stability_predicate(0.5, 0.0).is_err());
        assert!(stability_predicate(0.0, 3.7).is_err());
    }

    #[test]
    fn numerical_classifier_examples() {
        let grid = SpectralGrid::new(12).unwrap();
        for (omega, s, want) in [
            (0.0, 0.0, Verdict::Stable),
            (0.4, 0.0, Verdict::Unstable),
            (0.0, 1.2, Verdict::Unstable),
        ] {
            let roll = solve_roll(&params(0.02, omega, s), &grid, DEFAULT_TOL).unwrap();
            let v = classify_numerically(&roll, &default_sigma_grid(0.02), &grid, 1.0).unwrap();
            assert_eq!(v.verdict, want, "omega {omega} s {s}");
            if want == Verdict::Unstable {
                assert!(v.witness_lambda.unwrap().re > 0.0);
            }
        }
    }
}
