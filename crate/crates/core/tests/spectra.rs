use conslaw_core::bloch::{assemble_bloch, bloch_spectrum, critical_pairs, general_spectrum, DEFAULT_DELTA};
use conslaw_core::fourier::SpectralGrid;
use conslaw_core::reduced::leading_reduced_matrix;
use conslaw_core::roll::{solve_roll, RollParameters, RollSolution, DEFAULT_TOL};
use conslaw_core::verification::loglog_slope;
use num_complex::Complex64;

const SETS: [(f64, f64); 4] = [(0.0, 0.0), (0.0, 0.5), (0.25, 1.0), (-0.3, 0.8)];

fn roll(eps: f64, omega: f64, s: f64, modes: usize) -> RollSolution {
    solve_roll(
        &RollParameters::new(eps, omega, s).unwrap(),
        &SpectralGrid::new(modes).unwrap(),
        DEFAULT_TOL,
    )
    .unwrap()
}

fn critical(r: &RollSolution, sigma: f64) -> Vec<f64> {
    let grid = SpectralGrid::new(r.profile.n_modes()).unwrap();
    critical_pairs(&assemble_bloch(r, sigma, &grid).unwrap()).0
}

#[test]
fn critical_values_converge_in_truncation() {
    let mut worst = 0.0f64;
    for (omega, s) in SETS {
        for eps in [0.02, 0.05, 0.08] {
            let (coarse, fine) = (roll(eps, omega, s, 16), roll(eps, omega, s, 32));
            for sigma in [0.0, 0.01, 0.1, 0.4] {
                for (a, b) in critical(&coarse, sigma).iter().zip(critical(&fine, sigma)) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    assert!(worst < 1e-10);
}

#[test]
fn non_critical_spectrum_stays_below_minus_three() {
    let grid = SpectralGrid::new(32).unwrap();
    for (omega, s) in SETS {
        for eps in [0.01, 0.05] {
            let r = roll(eps, omega, s, 32);
            for sigma in [-0.1, -0.03, 0.0, 0.05, 0.1] {
                let sp = bloch_spectrum(&assemble_bloch(&r, sigma, &grid).unwrap(), DEFAULT_DELTA).unwrap();
                assert!(sp.gap > 3.0, "gap {} at eps={eps} sigma={sigma}", sp.gap);
            }
        }
    }
}

#[test]
fn coperiodic_spectrum_is_real() {
    let grid = SpectralGrid::new(8).unwrap();
    for (omega, s) in SETS {
        let r = roll(0.05, omega, s, 8);
        let op = assemble_bloch(&r, 0.0, &grid).unwrap();
        let im = general_spectrum(&op).iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert!(im < 1e-9);
    }
}

fn sorted_re(v: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = v.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn reduced_matrix_tracks_exact_critical_values() {
    // with sigma = eps * sigma_hat the remainder is third order in eps
    let epss = [0.01, 0.02, 0.04];
    for (omega, s) in SETS {
        for sh in [0.3, 1.0] {
            let devs: Vec<f64> = epss
                .iter()
                .map(|&eps| {
                    let r = roll(eps, omega, s, 24);
                    let exact = sorted_re(critical(&r, eps * sh));
                    let p = RollParameters::new(eps, omega, s).unwrap();
                    let reduced = sorted_re(
                        leading_reduced_matrix(&p, eps * sh)
                            .eigenvalues()
                            .map(|z: Complex64| z.re),
                    );
                    exact
                        .iter()
                        .zip(&reduced)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .collect();
            let order = loglog_slope(&epss, &devs);
            assert!(order > 2.6, "order {order}");
        }
    }
}

#[test]
fn large_sigma_hat_follows_constant_coefficient_curves() {
    // eps << sigma << 1, so both the roll dressing and the O(sigma) symbol corrections are small
    let eps = 0.002;
    for (omega, s) in SETS {
        let r = roll(eps, omega, s, 16);
        for sigma in [0.02, 0.04] {
            let got = sorted_re(critical(&r, sigma));
            let want = [-4.0 * sigma * sigma, -4.0 * sigma * sigma, -sigma * sigma];
            for (g, w) in got.iter().zip(want) {
                assert!(((g - w) / w).abs() < 0.2);
            }
        }
    }
}
