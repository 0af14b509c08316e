//! Bloch operators of the linearization about a roll and their spectra.
//!
//! In the shifted basis `e^{i(m+σ)ξ}` the operator factors as `B = K·H` with
//! `K = diag(k²(m+σ)²) ≥ 0` and `H` Hermitian (the diagonal symbol plus the
//! Toeplitz matrix of `df(ũ)`). Its spectrum equals that of the Hermitian
//! matrix `K^{1/2} H K^{1/2}`, which is what the production solver uses.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{require_finite, Error, Result};
use crate::fourier::{PeriodicField, SpectralGrid};
use crate::linalg::{general_eigenvalues, hermitian_eigen, refine_rightmost_cluster, sort_desc, CMatrix};
use crate::roll::{RollParameters, RollSolution};

pub const DEFAULT_DELTA: f64 = 1.0;
const REFINE_SWEEPS: usize = 3;

/// Eigenvalue `−(m+σ)²(1−(m+σ)²)²` of the constant-coefficient operator on `e^{imξ}`.
pub fn constant_symbol(m: i64, sigma: f64) -> f64 {
    let x = m as f64 + sigma;
    -x * x * (1.0 - x * x).powi(2)
}

#[derive(Debug, Clone)]
pub struct BlochOperator {
    pub params: RollParameters,
    pub k: f64,
    pub sigma: f64,
    pub n_modes: usize,
    /// Dense `(2M+1)×(2M+1)` matrix, rows and columns ordered `m = -M..=M`.
    pub matrix: CMatrix,
    /// `df(ũ) = ε² − 2sũ − 3ũ²`, resolved up to mode `2M`.
    pub df_field: PeriodicField,
    weights: Vec<f64>,
    potential: CMatrix,
}

impl BlochOperator {
    /// Hermitian matrix `K^{1/2} H K^{1/2}` sharing the spectrum of `matrix`.
    pub fn symmetrized(&self) -> CMatrix {
        let n = self.weights.len();
        let root: Vec<f64> = self.weights.iter().map(|w| w.sqrt()).collect();
        CMatrix::from_fn(n, n, |i, j| self.potential[(i, j)] * (root[i] * root[j]))
    }

    /// Maps an eigenvector of [`Self::symmetrized`] to one of `matrix`.
    pub fn lift(&self, y: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_iterator(y.len(), y.iter().zip(&self.weights).map(|(v, w)| v * w.sqrt()))
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.matrix * v
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    require_finite("sigma", sigma)?;
    if sigma.abs() > 0.5 {
        return Err(Error::OutOfRange {
            name: "sigma",
            value: sigma,
            range: "[-1/2, 1/2]",
        });
    }
    Ok(())
}

/// Linearization about `roll` restricted to Bloch number `sigma`.
pub fn assemble_bloch(roll: &RollSolution, sigma: f64, grid: &SpectralGrid) -> Result<BlochOperator> {
    check_sigma(sigma)?;
    let p = roll.params;
    let k = p.k();
    let nb = grid.n_modes();
    let nr = roll.profile.n_modes();
    let n_points = (2 * nr + 2 * nb + 1).next_power_of_two().max(8);
    let (eps2, s) = (p.eps * p.eps, p.s);
    let df_field = roll
        .profile
        .pointwise(2 * nb, n_points, |u| eps2 - 2.0 * s * u - 3.0 * u * u);
    let dim = 2 * nb + 1;
    let shift = |i: usize| i as f64 - nb as f64 + sigma;
    let weights: Vec<f64> = (0..dim).map(|i| k * k * shift(i) * shift(i)).collect();
    let potential = CMatrix::from_fn(dim, dim, |i, j| {
        let d = df_field.coeff(i as i64 - j as i64);
        if i == j {
            d - (1.0 - weights[i]).powi(2)
        } else {
            d
        }
    });
    let matrix = CMatrix::from_fn(dim, dim, |i, j| potential[(i, j)] * weights[i]);
    Ok(BlochOperator {
        params: p,
        k,
        sigma,
        n_modes: nb,
        matrix,
        df_field,
        weights,
        potential,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BlochSpectrum {
    pub sigma: f64,
    /// Sorted by descending real part.
    pub eigenvalues: Vec<Complex64>,
    /// Positions of the three eigenvalues of smallest modulus in `eigenvalues`.
    pub critical: [usize; 3],
    /// `−max Re λ` over the non-critical eigenvalues.
    pub gap: f64,
}

impl BlochSpectrum {
    pub fn critical_values(&self) -> [Complex64; 3] {
        self.critical.map(|i| self.eigenvalues[i])
    }

    pub fn max_critical_re(&self) -> f64 {
        self.critical_values()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Critical eigenpairs of `op`: ascending eigenvalues and eigenvectors of `op.matrix`.
pub fn critical_pairs(op: &BlochOperator) -> (Vec<f64>, Vec<DVector<Complex64>>) {
    let s = op.symmetrized();
    let (values, vectors) = hermitian_eigen(&s);
    let (_, crit) = split_critical(&values);
    let (refined, ritz) = refine(&s, &values, &vectors, &crit);
    let lifted = (0..3).map(|j| op.lift(&ritz.column(j).into_owned())).collect();
    (refined, lifted)
}

fn split_critical(values: &[f64]) -> (Vec<usize>, [usize; 3]) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs()));
    (order[3..].to_vec(), [order[0], order[1], order[2]])
}

fn refine(s: &CMatrix, values: &[f64], vectors: &CMatrix, crit: &[usize; 3]) -> (Vec<f64>, CMatrix) {
    let start = CMatrix::from_columns(&crit.map(|i| vectors.column(i).into_owned()));
    let top = crit.iter().map(|&i| values[i]).fold(0.0, f64::max);
    refine_rightmost_cluster(s, start, top + 1.0, REFINE_SWEEPS)
}

/// Full spectrum with the three critical eigenvalues flagged.
///
/// Fails with [`Error::GapViolation`] when the rest of the spectrum is not
/// below `−delta`.
pub fn bloch_spectrum(op: &BlochOperator, delta: f64) -> Result<BlochSpectrum> {
    if !(delta > 0.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "(0, ∞)",
        });
    }
    let s = op.symmetrized();
    let (values, vectors) = hermitian_eigen(&s);
    let (rest, crit) = split_critical(&values);
    let (refined, _) = refine(&s, &values, &vectors, &crit);
    let gap = -rest.iter().map(|&i| values[i]).fold(f64::NEG_INFINITY, f64::max);
    let mut tagged: Vec<(Complex64, bool)> = rest
        .iter()
        .map(|&i| (Complex64::new(values[i], 0.0), false))
        .chain(refined.iter().map(|&v| (Complex64::new(v, 0.0), true)))
        .collect();
    tagged.sort_by(|a, b| b.0.re.total_cmp(&a.0.re).then(b.1.cmp(&a.1)));
    let flagged: Vec<usize> = tagged.iter().enumerate().filter(|(_, t)| t.1).map(|(i, _)| i).collect();
    let spectrum = BlochSpectrum {
        sigma: op.sigma,
        eigenvalues: tagged.into_iter().map(|t| t.0).collect(),
        critical: [flagged[0], flagged[1], flagged[2]],
        gap,
    };
    if gap <= delta {
        return Err(Error::GapViolation {
            sigma: op.sigma,
            gap,
            delta,
        });
    }
    Ok(spectrum)
}

/// Spectrum of `op.matrix` from the general complex Schur form, sorted by
/// descending real part. Independent of the Hermitian reformulation.
pub fn general_spectrum(op: &BlochOperator) -> Vec<Complex64> {
    let mut v = general_eigenvalues(&op.matrix);
    sort_desc(&mut v);
    v
}

/// Spectra along `sigmas` with the critical eigenvalues reordered so that
/// `critical[j]` follows one continuous curve.
pub fn critical_curves(
    roll: &RollSolution,
    sigmas: &[f64],
    grid: &SpectralGrid,
    delta: f64,
) -> Result<Vec<BlochSpectrum>> {
    for &s in sigmas {
        check_sigma(s)?;
    }
    let mut spectra = sigmas
        .par_iter()
        .map(|&s| bloch_spectrum(&assemble_bloch(roll, s, grid)?, delta))
        .collect::<Result<Vec<_>>>()?;
    for i in 1..spectra.len() {
        let prev = spectra[i - 1].critical_values();
        let predicted: [Complex64; 3] = if i >= 2 {
            let older = spectra[i - 2].critical_values();
            std::array::from_fn(|j| prev[j] * 2.0 - older[j])
        } else {
            prev
        };
        let current = spectra[i].critical;
        let values = spectra[i].critical_values();
        let mut best = (f64::INFINITY, current);
        for perm in PERMUTATIONS {
            let cost: f64 = (0..3).map(|j| (values[perm[j]] - predicted[j]).norm()).sum();
            if cost < best.0 {
                best = (cost, perm.map(|p| current[p]));
            }
        }
        spectra[i].critical = best.1;
    }
    Ok(spectra)
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
