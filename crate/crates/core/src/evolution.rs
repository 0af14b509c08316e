//! Time integration of the full model on multi-period domains, and of the
//! amplitude system, by fourth-order exponential time differencing.

use num_complex::Complex64;
use serde::Serialize;

use crate::bloch::{assemble_bloch, critical_pairs};
use crate::error::{require_finite, Error, Result};
use crate::fourier::{dealiased_points, fft_pair, inner_product, PeriodicField, SpectralGrid};
use crate::linalg::null_vector3;
use crate::mgl::{mgl_dispersion_matrix, wavenumber, MglParameters};
use crate::roll::{RollParameters, RollSolution};

/// Bound on `dt` times the explicit (nonlinear) stiffness after exponential damping.
pub const STABILITY_LIMIT: f64 = 2.5;
/// Blow-up threshold relative to the initial perturbation norm.
pub const BLOWUP_FACTOR: f64 = 1e6;
pub const MAX_T_FINAL: f64 = 1e4;
const CONTOUR_POINTS: usize = 32;
const MAX_SAMPLES: usize = 2000;

/// Exponential time differencing RK4 for `v' = L v + N(v)` with diagonal real `L`.
#[derive(Debug, Clone)]
pub struct Etdrk4 {
    dt: f64,
    e: Vec<f64>,
    e2: Vec<f64>,
    q: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    f3: Vec<f64>,
}

impl Etdrk4 {
    /// Coefficients by contour averaging, accurate for any sign and size of `L·dt`.
    pub fn new(linear: &[f64], dt: f64) -> Self {
        let n = linear.len();
        let mut s = Etdrk4 {
            dt,
            e: Vec::with_capacity(n),
            e2: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        let roots: Vec<Complex64> = (0..CONTOUR_POINTS)
            .map(|j| {
                Complex64::from_polar(
                    1.0,
                    std::f64::consts::PI * (2.0 * j as f64 + 1.0) / CONTOUR_POINTS as f64,
                )
            })
            .collect();
        for &l in linear {
            let lh = l * dt;
            let (mut q, mut f1, mut f2, mut f3) = (0.0, 0.0, 0.0, 0.0);
            for r in &roots {
                let z = r + lh;
                let ez = z.exp();
                let z3 = z * z * z;
                q += (((z / 2.0).exp() - 1.0) / z).re;
                f1 += ((-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3).re;
                f2 += ((2.0 + z + ez * (z - 2.0)) / z3).re;
                f3 += ((-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3).re;
            }
            let m = CONTOUR_POINTS as f64;
            s.e.push(lh.exp());
            s.e2.push((lh / 2.0).exp());
            s.q.push(dt * q / m);
            s.f1.push(dt * f1 / m);
            s.f2.push(dt * f2 / m);
            s.f3.push(dt * f3 / m);
        }
        s
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, v: &mut [Complex64], nonlinear: &mut impl FnMut(&[Complex64]) -> Vec<Complex64>) {
        let n = v.len();
        let nv = nonlinear(v);
        let a: Vec<Complex64> = (0..n).map(|j| v[j] * self.e2[j] + nv[j] * self.q[j]).collect();
        let na = nonlinear(&a);
        let b: Vec<Complex64> = (0..n).map(|j| v[j] * self.e2[j] + na[j] * self.q[j]).collect();
        let nb = nonlinear(&b);
        let c: Vec<Complex64> = (0..n)
            .map(|j| a[j] * self.e2[j] + (nb[j] * 2.0 - nv[j]) * self.q[j])
            .collect();
        let nc = nonlinear(&c);
        for j in 0..n {
            v[j] = v[j] * self.e[j] + nv[j] * self.f1[j] + (na[j] + nb[j]) * (2.0 * self.f2[j]) + nc[j] * self.f3[j];
        }
    }
}

/// Pseudospectral integrator of the model on `n_periods` roll periods.
///
/// Fields are stored as [`PeriodicField`]s in `y = ξ/n_periods`, so domain mode
/// `n` has wavenumber `n/n_periods` in `ξ`.
#[derive(Debug, Clone)]
pub struct PdeIntegrator {
    params: RollParameters,
    n_periods: usize,
    n_modes: usize,
    n_points: usize,
    linear: Vec<f64>,
    flux: Vec<f64>,
    scheme: Etdrk4,
}

impl PdeIntegrator {
    pub fn new(params: RollParameters, n_periods: usize, n_modes: usize, dt: f64) -> Self {
        let k = params.k();
        let eps2 = params.eps * params.eps;
        let kk: Vec<f64> = (-(n_modes as i64)..=n_modes as i64)
            .map(|n| {
                let kappa = n as f64 / n_periods as f64;
                k * k * kappa * kappa
            })
            .collect();
        let linear: Vec<f64> = kk.iter().map(|&q| q * (-(1.0 - q).powi(2) + eps2)).collect();
        let scheme = Etdrk4::new(&linear, dt);
        PdeIntegrator {
            params,
            n_periods,
            n_modes,
            n_points: dealiased_points(n_modes),
            linear,
            flux: kk,
            scheme,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// `−k²∂²(−su² − u³)` with the mean mode set to zero.
    pub fn nonlinear(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let s = self.params.s;
        let u = PeriodicField::from_coeffs_unchecked(coeffs.to_vec());
        let poly = u.pointwise(self.n_modes, self.n_points, |x| s * x * x + x * x * x);
        let mut out: Vec<Complex64> = poly.coeffs().iter().zip(&self.flux).map(|(c, kk)| -c * kk).collect();
        out[self.n_modes] = Complex64::new(0.0, 0.0);
        out
    }

    pub fn step(&self, u: &mut PeriodicField) {
        let mut v = u.coeffs().to_vec();
        self.scheme.step(&mut v, &mut |w| self.nonlinear(w));
        v[self.n_modes] = u.coeff(0);
        *u = PeriodicField::from_coeffs_unchecked(v);
    }

    /// `dt · max_n κ_n² k² max|2sũ + 3ũ²| / (1 + dt|L_n|)` for a state `u`.
    pub fn stiffness_estimate(&self, u: &PeriodicField) -> f64 {
        let s = self.params.s;
        let slope = u
            .to_physical(self.n_points)
            .into_iter()
            .map(|x| (2.0 * s * x + 3.0 * x * x).abs())
            .fold(0.0, f64::max);
        let dt = self.scheme.dt();
        self.flux
            .iter()
            .zip(&self.linear)
            .map(|(kk, l)| dt * kk * slope / (1.0 + dt * l.abs()))
            .fold(0.0, f64::max)
    }

    pub fn n_periods(&self) -> usize {
        self.n_periods
    }
}

/// Spatial mean of `u`.
pub fn mass(u: &PeriodicField) -> f64 {
    u.mean()
}

fn field_norm(u: &PeriodicField) -> f64 {
    inner_product(u, u).map(f64::sqrt).unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolutionConfig {
    pub n_periods: usize,
    pub dt: f64,
    pub t_final: f64,
    pub perturbation_amplitude: f64,
    pub seed_sigma: f64,
}

impl EvolutionConfig {
    pub const DEFAULT_AMPLITUDE: f64 = 1e-6;

    /// `10/|rate|`, capped at [`MAX_T_FINAL`].
    pub fn default_t_final(rate: f64) -> f64 {
        if rate == 0.0 {
            MAX_T_FINAL
        } else {
            (10.0 / rate.abs()).min(MAX_T_FINAL)
        }
    }

    /// Bloch numbers representable on `n_periods` periods are `j/n_periods`.
    pub fn rounded_sigma(sigma: f64, n_periods: usize) -> f64 {
        (sigma * n_periods as f64).round() / n_periods as f64
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("dt", self.dt)?;
        require_finite("t_final", self.t_final)?;
        require_finite("amp", self.perturbation_amplitude)?;
        require_finite("sigma", self.seed_sigma)?;
        if self.n_periods == 0 {
            return Err(Error::InvalidParameter {
                name: "periods",
                reason: "need at least one period".into(),
            });
        }
        for (name, v) in [
            ("dt", self.dt),
            ("t_final", self.t_final),
            ("amp", self.perturbation_amplitude),
        ] {
            if v <= 0.0 {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    range: "(0, ∞)",
                });
            }
        }
        if self.seed_sigma.abs() > 0.5 {
            return Err(Error::OutOfRange {
                name: "sigma",
                value: self.seed_sigma,
                range: "[-1/2, 1/2]",
            });
        }
        let j = self.seed_sigma * self.n_periods as f64;
        if (j - j.round()).abs() > 1e-9 {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!(
                    "sigma * periods = {j} must be an integer; nearest admissible sigma is {}",
                    Self::rounded_sigma(self.seed_sigma, self.n_periods)
                ),
            });
        }
        Ok(())
    }

    fn bloch_index(&self) -> i64 {
        (self.seed_sigma * self.n_periods as f64).round() as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolutionSample {
    pub t: f64,
    pub perturbation_norm: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionRun {
    pub config: EvolutionConfig,
    /// Largest critical Bloch eigenvalue at the seed Bloch number.
    pub predicted_rate: f64,
    pub samples: Vec<EvolutionSample>,
}

impl EvolutionRun {
    /// Least-squares slope of `ln ‖u − ũ‖` over the second half of the run.
    pub fn growth_rate(&self) -> f64 {
        log_slope(&self.samples)
    }

    /// Largest deviation of the mass from its initial value.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.samples.first().map(|s| s.mass).unwrap_or(0.0);
        self.samples.iter().map(|s| (s.mass - m0).abs()).fold(0.0, f64::max)
    }
}

pub(crate) fn log_slope(samples: &[EvolutionSample]) -> f64 {
    let t_end = samples.last().map(|s| s.t).unwrap_or(0.0);
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.t >= 0.5 * t_end && s.perturbation_norm > 0.0)
        .map(|s| (s.t, s.perturbation_norm.ln()))
        .collect();
    let n = pts.len() as f64;
    let (mt, my) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |a, p| {
        (a.0 + (p.0 - mt) * (p.1 - my), a.1 + (p.0 - mt).powi(2))
    });
    sxy / sxx
}

/// Copies a roll onto `n_periods` periods with `n_modes` domain modes.
pub fn tile_roll(roll: &RollSolution, n_periods: usize, n_modes: usize) -> PeriodicField {
    let mut u = PeriodicField::zeros(n_modes);
    for m in 1..=roll.profile.n_modes() {
        let n = m * n_periods;
        if n <= n_modes {
            u.set_pair(n as i64, roll.profile.coeff(m as i64));
        }
    }
    u
}

/// Evolves `roll` plus a small Bloch eigenmode at `config.seed_sigma` and records
/// the distance to the roll.
pub fn evolve(roll: &RollSolution, config: &EvolutionConfig) -> Result<EvolutionRun> {
    config.validate()?;
    let m_periods = config.n_periods;
    let nr = roll.profile.n_modes();
    let n_modes = (nr + 1) * m_periods;
    let grid = SpectralGrid::new(nr.max(SpectralGrid::MIN_MODES))?;
    let op = assemble_bloch(roll, config.seed_sigma, &grid)?;
    let (values, vectors) = critical_pairs(&op);
    let (lead, rate) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, &v)| (i, v))
        .expect("three critical pairs");
    let v = &vectors[lead];
    let j = config.bloch_index();
    let nb = grid.n_modes() as i64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * n_modes + 1];
    for m in -nb..=nb {
        let n = m * m_periods as i64 + j;
        if n.unsigned_abs() as usize > n_modes {
            continue;
        }
        let c = v[(m + nb) as usize] * 0.5;
        coeffs[(n + n_modes as i64) as usize] += c;
        coeffs[(n_modes as i64 - n) as usize] += c.conj();
    }
    let w = PeriodicField::from_coeffs_unchecked(coeffs);
    let w = w.scale(config.perturbation_amplitude / field_norm(&w));
    let base = tile_roll(roll, m_periods, n_modes);
    let mut u = base.add(&w)?;

    let integrator = PdeIntegrator::new(roll.params, m_periods, n_modes, config.dt);
    let bound = integrator.stiffness_estimate(&u);
    if bound > STABILITY_LIMIT {
        return Err(Error::StepReject {
            dt: config.dt,
            bound,
            limit: STABILITY_LIMIT,
        });
    }
    let steps = (config.t_final / config.dt).round().max(1.0) as usize;
    let every = steps.div_ceil(MAX_SAMPLES).max(1);
    let n0 = field_norm(&w);
    let mut samples = vec![EvolutionSample {
        t: 0.0,
        perturbation_norm: n0,
        mass: mass(&u),
    }];
    for step in 1..=steps {
        integrator.step(&mut u);
        if step % every == 0 || step == steps {
            let t = step as f64 * config.dt;
            let norm = field_norm(&u.sub(&base)?);
            if !norm.is_finite() || norm > BLOWUP_FACTOR * n0 {
                return Err(Error::BlowUp { time: t, norm });
            }
            samples.push(EvolutionSample {
                t,
                perturbation_norm: norm,
                mass: mass(&u),
            });
        }
    }
    Ok(EvolutionRun {
        config: *config,
        predicted_rate: rate,
        samples,
    })
}

/// Integrator of the amplitude system on a periodic slow domain.
#[derive(Debug, Clone)]
pub struct MglIntegrator {
    params: MglParameters,
    length: f64,
    n_points: usize,
    kappa2: Vec<f64>,
    scheme: Etdrk4,
}

impl MglIntegrator {
    pub fn new(params: MglParameters, length: f64, n_points: usize, dt: f64) -> Self {
        let kappa2: Vec<f64> = (0..n_points).map(|j| wavenumber(j, n_points, length).powi(2)).collect();
        let linear: Vec<f64> = kappa2
            .iter()
            .map(|k2| 1.0 - 4.0 * k2)
            .chain(kappa2.iter().map(|k2| -k2))
            .collect();
        MglIntegrator {
            params,
            length,
            n_points,
            kappa2,
            scheme: Etdrk4::new(&linear, dt),
        }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Advances nodal values of `(A, B)` by `steps` steps.
    pub fn advance(&self, a: &mut [Complex64], b: &mut [f64], steps: usize) {
        let n = self.n_points;
        let (forward, inverse) = fft_pair(n);
        let g = self.params.cubic_coefficient();
        let s = self.params.s;
        let mut state: Vec<Complex64> = a.to_vec();
        forward.process(&mut state);
        let mut bh: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        forward.process(&mut bh);
        state.extend(bh);
        let inv = 1.0 / n as f64;
        let mut nonlinear = |v: &[Complex64]| {
            let mut aa = v[..n].to_vec();
            let mut bb = v[n..].to_vec();
            inverse.process(&mut aa);
            inverse.process(&mut bb);
            let mut na: Vec<Complex64> = Vec::with_capacity(n);
            let mut m2: Vec<Complex64> = Vec::with_capacity(n);
            for j in 0..n {
                let (x, y) = (aa[j] * inv, bb[j].re * inv);
                na.push(-g * x.norm_sqr() * x - 2.0 * s * x * y);
                m2.push(Complex64::new(x.norm_sqr(), 0.0));
            }
            forward.process(&mut na);
            forward.process(&mut m2);
            for (x, k2) in m2.iter_mut().zip(&self.kappa2) {
                *x *= -0.5 * s * k2;
            }
            na.extend(m2);
            na
        };
        for _ in 0..steps {
            self.scheme.step(&mut state, &mut nonlinear);
        }
        let mut aa = state[..n].to_vec();
        let mut bb = state[n..].to_vec();
        inverse.process(&mut aa);
        inverse.process(&mut bb);
        for j in 0..n {
            a[j] = aa[j] * inv;
            b[j] = bb[j].re * inv;
        }
    }
}

/// Growth rate of the linearized amplitude system about the stationary wave
/// train, measured by integrating a small eigenmode of the dispersion matrix.
///
/// `mode` indexes the eigenvalues in descending order. `sigma_hat` and `omega`
/// must be multiples of `2π/length`.
pub fn measure_mgl_rate(
    params: MglParameters,
    sigma_hat: f64,
    mode: usize,
    length: f64,
    n_points: usize,
    dt: f64,
    t_final: f64,
) -> Result<f64> {
    let base_k = 2.0 * std::f64::consts::PI / length;
    for (name, v) in [("sigma_hat", sigma_hat), ("omega", params.omega)] {
        let ratio = v / base_k;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("{v} is not a multiple of 2π/L = {base_k}"),
            });
        }
    }
    let disp = mgl_dispersion_matrix(&params, sigma_hat);
    let lambda = disp.eigenvalues[mode];
    let mut shifted = disp.matrix;
    for (i, row) in shifted.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let beta = null_vector3(&shifted);
    let a0 = params.amplitude();
    let delta = 1e-7 * a0.max(1.0);
    let xs: Vec<f64> = (0..n_points).map(|j| length * j as f64 / n_points as f64).collect();
    let base: Vec<Complex64> = xs
        .iter()
        .map(|&x| Complex64::from_polar(a0, params.omega * x))
        .collect();
    let mut a = Vec::with_capacity(n_points);
    let mut b = Vec::with_capacity(n_points);
    for (j, &x) in xs.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, sigma_hat * x);
        let p = (beta[0] * phase).re * delta;
        let q = -(beta[1] * phase).re * delta;
        a.push(base[j] + Complex64::new(p, q) * Complex64::from_polar(1.0, params.omega * x));
        b.push((beta[2] * phase).re * delta);
    }
    let distance = |a: &[Complex64], b: &[f64]| {
        a.iter()
            .zip(&base)
            .map(|(x, y)| (x - y).norm_sqr())
            .chain(b.iter().map(|v| v * v))
            .sum::<f64>()
            .sqrt()
    };
    let d0 = distance(&a, &b);
    let integrator = MglIntegrator::new(params, length, n_points, dt);
    let steps = (t_final / dt).round() as usize;
    integrator.advance(&mut a, &mut b, steps);
    let d1 = distance(&a, &b);
    Ok((d1 / d0).ln() / (steps as f64 * dt))
}
