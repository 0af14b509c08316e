//! Dense eigenvalue helpers shared by the spectral modules.

use nalgebra::{DMatrix, DVector, Matrix3, Schur, SymmetricEigen};
use num_complex::Complex64;

pub(crate) type CMatrix = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// All eigenvalues of a general complex matrix via the complex Schur form.
pub fn general_eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    let n = m.nrows();
    let schur = Schur::new(m.clone());
    let (_, t) = schur.unpack();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].norm() != 0.0 {
            // leftover 2×2 block
            let (a, b, cc, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let half_tr = (a + d) * 0.5;
            let disc = ((a - d) * 0.5).powi(2) + b * cc;
            let root = disc.sqrt();
            out.push(half_tr + root);
            out.push(half_tr - root);
            i += 2;
        } else {
            out.push(t[(i, i)]);
            i += 1;
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix (only the lower triangle is read).
pub(crate) fn hermitian_eigen(s: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(s.clone());
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Refines a cluster of eigenpairs of a Hermitian matrix that lie to the right of
/// the rest of the spectrum: block inverse iteration with shift `mu` followed by a
/// Rayleigh–Ritz projection. Returns ascending Ritz values and vectors.
pub(crate) fn refine_rightmost_cluster(s: &CMatrix, start: CMatrix, mu: f64, sweeps: usize) -> (Vec<f64>, CMatrix) {
    let n = s.nrows();
    let shifted = s - CMatrix::identity(n, n) * c(mu);
    let lu = shifted.lu();
    let mut x = start.qr().q();
    for _ in 0..sweeps {
        let y = lu.solve(&x).unwrap_or_else(|| x.clone());
        x = y.qr().q();
    }
    let g = x.adjoint() * s * &x;
    let g = (&g + g.adjoint()) * c(0.5);
    let eig = SymmetricEigen::new(g);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_columns(
        &order
            .iter()
            .map(|&i| &x * eig.eigenvectors.column(i))
            .collect::<Vec<DVector<Complex64>>>(),
    );
    (values, vectors)
}

/// Eigenvalues of a 3×3 complex matrix.
pub(crate) fn eigenvalues3(m: &[[Complex64; 3]; 3]) -> [Complex64; 3] {
    let mat = Matrix3::from_fn(|i, j| m[i][j]);
    let dm = CMatrix::from_iterator(3, 3, mat.iter().copied());
    let v = general_eigenvalues(&dm);
    [v[0], v[1], v[2]]
}

/// Roots of `λ³ + a2 λ² + a1 λ + a0` as eigenvalues of the companion matrix.
pub fn companion_roots(a2: f64, a1: f64, a0: f64) -> [Complex64; 3] {
    let m = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, -a0, 1.0, 0.0, -a1, 0.0, 1.0, -a2]);
    let ev = Schur::new(m).complex_eigenvalues();
    [ev[0], ev[1], ev[2]]
}

/// Sorts by descending real part, ties by descending imaginary part.
pub(crate) fn sort_desc(v: &mut [Complex64]) {
    v.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

/// Least-squares coefficients of `Σ_j p_j x^j` for the given powers.
pub(crate) fn polyfit(xs: &[f64], ys: &[f64], powers: &[i32]) -> Vec<f64> {
    let a = DMatrix::from_fn(xs.len(), powers.len(), |i, j| xs[i].powi(powers[j]));
    let b = DVector::from_column_slice(ys);
    let svd = a.svd(true, true);
    let sol = svd.solve(&b, 1e-300).expect("least squares");
    sol.iter().copied().collect()
}

/// Unit null vector of a singular 3×3 matrix from the largest cross product of two rows.
pub(crate) fn null_vector3(a: &[[Complex64; 3]; 3]) -> [Complex64; 3] {
    let cross = |r: &[Complex64; 3], t: &[Complex64; 3]| {
        [
            r[1] * t[2] - r[2] * t[1],
            r[2] * t[0] - r[0] * t[2],
            r[0] * t[1] - r[1] * t[0],
        ]
    };
    let norm = |v: &[Complex64; 3]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let best = [cross(&a[0], &a[1]), cross(&a[0], &a[2]), cross(&a[1], &a[2])]
        .into_iter()
        .max_by(|x, y| norm(x).total_cmp(&norm(y)))
        .expect("three candidates");
    let n = norm(&best);
    if n == 0.0 {
        // rank ≤ 1: any vector orthogonal (bilinearly) to the dominant row
        let r = a.iter().max_by(|x, y| norm(x).total_cmp(&norm(y))).expect("three rows");
        let e = if r[0].norm() > r[1].norm() {
            [-r[1], r[0], Complex64::new(0.0, 0.0)]
        } else {
            [Complex64::new(0.0, 0.0), -r[2], r[1]]
        };
        let m = norm(&e);
        if m == 0.0 {
            return [
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ];
        }
        return e.map(|z| z / m);
    }
    best.map(|z| z / n)
}
