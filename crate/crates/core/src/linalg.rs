//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;

use crate::{CMatrix, CVector, C64};

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    DMatrix::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMatrix {
    DMatrix::identity(n, n)
}

/// Largest entry modulus; zero for empty matrices.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Singular value decomposition with singular values sorted in descending
/// order. Returns `(u, sigma, v)` with `m = u diag(sigma) v*`; `u` is
/// `rows x k`, `v` is `cols x k`, `k = min(rows, cols)`.
///
/// The LAPACK-style bidiagonal SVD in nalgebra occasionally returns factors
/// that do not reconstruct complex input. Each result is validated and a
/// one-sided Jacobi SVD is used when the check fails.
pub fn svd_sorted(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return (zeros(rows, 0), Vec::new(), zeros(cols, 0));
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v = svd.v_t.expect("v_t requested").adjoint();
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let (u, sigma, v) = if svd_defect(m, &u, &sigma, &v) <= SVD_CHECK_TOL {
        (u, sigma, v)
    } else {
        jacobi_svd(m)
    };
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let mut us = zeros(rows, k);
    let mut vs = zeros(cols, k);
    let mut sorted = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        us.set_column(dst, &u.column(src));
        vs.set_column(dst, &v.column(src));
        sorted.push(sigma[src]);
    }
    (us, sorted, vs)
}

/// Relative tolerance for accepting a decomposition, per unit of size.
const SVD_CHECK_TOL: f64 = 1e-13;

/// `max(||m - u s v*|| / ||m||, ||u*u - I||, ||v*v - I||) / size`, entrywise.
fn svd_defect(m: &CMatrix, u: &CMatrix, sigma: &[f64], v: &CMatrix) -> f64 {
    let k = sigma.len();
    let mut us = u.clone();
    for (j, &s) in sigma.iter().enumerate() {
        us.column_mut(j).scale_mut(s);
    }
    let scale = max_abs(m).max(f64::MIN_POSITIVE);
    let recon = max_abs(&(us * v.adjoint() - m)) / scale;
    let ou = max_abs(&(u.adjoint() * u - identity(k)));
    let ov = max_abs(&(v.adjoint() * v - identity(k)));
    let size = m.nrows().max(m.ncols()) as f64;
    if !(recon.is_finite() && ou.is_finite() && ov.is_finite()) {
        return f64::INFINITY;
    }
    recon.max(ou).max(ov) / size
}

/// One-sided (Hestenes) Jacobi SVD, unsorted. Slower than the bidiagonal
/// method but unconditionally convergent and accurate for small matrices.
pub fn jacobi_svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    if m.nrows() < m.ncols() {
        let (u, s, v) = jacobi_svd(&m.adjoint());
        return (v, s, u);
    }
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = identity(cols);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let xp = mat[(i, p)];
                        let xq = mat[(i, q)] * phase;
                        mat[(i, p)] = xp * c - xq * s;
                        mat[(i, q)] = xp * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let mut u = zeros(rows, cols);
    let mut missing = Vec::new();
    for j in 0..cols {
        if sigma[j] > smax * f64::EPSILON * rows as f64 && sigma[j] > 0.0 {
            u.set_column(j, &(a.column(j) / C64::new(sigma[j], 0.0)));
        } else {
            missing.push(j);
        }
    }
    // Complete U for (numerically) zero singular values with the standard
    // basis vector that keeps most of its norm after projection.
    for j in missing {
        let residual = |k: usize| {
            let mut x = CVector::zeros(rows);
            x[k] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for i in 0..cols {
                    let ui = u.column(i).into_owned();
                    let proj = ui.dotc(&x);
                    x -= ui * proj;
                }
            }
            x
        };
        let best = (0..rows).map(residual).max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("rows > 0");
        let norm = best.norm();
        u.set_column(j, &(best / C64::new(norm, 0.0)));
    }
    (u, sigma, v)
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    svd_sorted(m).1
}

/// Spectral norm.
pub fn op_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Number of singular values strictly above `threshold`.
pub fn rank_above(m: &CMatrix, threshold: f64) -> usize {
    singular_values(m).iter().filter(|&&s| s > threshold).count()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vecs = zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        vals.push(eig.eigenvalues[src]);
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Deviation from Hermitian symmetry, `max |m - m*|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

/// Orthonormal basis (as columns) of the span of singular vectors whose
/// singular value exceeds `threshold`.
pub fn range_basis(m: &CMatrix, threshold: f64) -> CMatrix {
    let (u, sigma, _) = svd_sorted(m);
    let r = sigma.iter().filter(|&&s| s > threshold).count();
    u.columns(0, r).into_owned()
}

/// Orthonormal basis (as columns) of the null space, singular values at or
/// below `threshold` counted as zero.
pub fn null_space(m: &CMatrix, threshold: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return zeros(0, 0);
    }
    // Pad so the SVD exposes a full right basis.
    let padded = if rows < cols {
        let mut p = zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let (_, sigma, v) = svd_sorted(&padded);
    let r = sigma.iter().filter(|&&s| s > threshold).count();
    v.columns(r, cols - r).into_owned()
}

/// Largest principal angle between the column spans of two matrices with
/// orthonormal columns. Computed through sines, which stay accurate for
/// nearly coincident subspaces. Returns `pi/2` when the dimensions differ
/// and one side is nonzero.
pub fn largest_principal_angle(a: &CMatrix, b: &CMatrix) -> f64 {
    let (da, db) = (a.ncols(), b.ncols());
    if da == 0 && db == 0 {
        return 0.0;
    }
    if da != db {
        return std::f64::consts::FRAC_PI_2;
    }
    let sin_ab = op_norm(&(b - a * (a.adjoint() * b)));
    let sin_ba = op_norm(&(a - b * (b.adjoint() * a)));
    sin_ab.max(sin_ba).min(1.0).asin()
}

/// Gram-Schmidt with reorthogonalisation. Columns whose residual norm falls
/// to or below `drop_tol` are discarded.
pub fn orthonormalize(columns: &[CVector], drop_tol: f64) -> Vec<CVector> {
    let mut out: Vec<CVector> = Vec::with_capacity(columns.len());
    for c in columns {
        let mut w = c.clone();
        for _ in 0..2 {
            for q in &out {
                let proj = q.dotc(&w);
                w -= q * proj;
            }
        }
        let norm = w.norm();
        if norm > drop_tol {
            out.push(w / C64::new(norm, 0.0));
        }
    }
    out
}

/// Stacks vectors as columns.
pub fn columns_to_matrix(rows: usize, columns: &[CVector]) -> CMatrix {
    let mut m = zeros(rows, columns.len());
    for (j, c) in columns.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Orthonormality defect `max |V* V - I|` of the given columns.
pub fn orthonormality_defect(columns: &[CVector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in columns.iter().enumerate() {
        for (j, b) in columns.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.dotc(b) - target).norm());
        }
    }
    worst
}

/// Reduced row echelon form of the rows of `rows_in`, with pivots scaled to
/// one. Real and imaginary parts at or below `snap` are set to exactly zero
/// afterwards.
pub fn reduced_row_echelon(rows_in: &CMatrix, snap: f64) -> CMatrix {
    let mut m = rows_in.clone();
    let (rows, cols) = m.shape();
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        let (best, best_abs) = (pivot_row..rows)
            .map(|r| (r, m[(r, col)].norm()))
            .fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= snap {
            continue;
        }
        m.swap_rows(pivot_row, best);
        let p = m[(pivot_row, col)];
        for c in 0..cols {
            m[(pivot_row, c)] /= p;
        }
        for r in 0..rows {
            if r != pivot_row {
                let f = m[(r, col)];
                if f.norm() > 0.0 {
                    for c in 0..cols {
                        let v = m[(pivot_row, c)];
                        m[(r, c)] -= f * v;
                    }
                }
            }
        }
        pivot_row += 1;
    }
    for z in m.iter_mut() {
        if z.re.abs() <= snap {
            z.re = 0.0;
        }
        if z.im.abs() <= snap {
            z.im = 0.0;
        }
    }
    m.rows(0, pivot_row).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = CMatrix::from_row_slice(1, 3, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.ncols(), 2);
        assert!(max_abs(&(&m * &ns)) < 1e-14);
    }

    #[test]
    fn principal_angle_of_rotated_lines() {
        let theta: f64 = 0.3;
        let a = CMatrix::from_column_slice(2, 1, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let b = CMatrix::from_column_slice(2, 1, &[c(theta.cos(), 0.0), c(theta.sin(), 0.0)]);
        assert!((largest_principal_angle(&a, &b) - theta).abs() < 1e-14);
        assert_eq!(largest_principal_angle(&a, &a), 0.0);
    }

    #[test]
    fn eigenvalues_ascending() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let vals = hermitian_eigenvalues(&m);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn echelon_scales_pivot() {
        let m = CMatrix::from_row_slice(1, 3, &[c(0.0, 0.0), c(0.0, 2.0), c(0.0, 0.0)]);
        let r = reduced_row_echelon(&m, 1e-13);
        assert_eq!(r[(0, 1)], c(1.0, 0.0));
    }

    fn reconstruction(m: &CMatrix, (u, s, v): &(CMatrix, Vec<f64>, CMatrix)) -> f64 {
        let d = CMatrix::from_diagonal(&CVector::from_iterator(s.len(), s.iter().map(|&x| c(x, 0.0))));
        max_abs(&(u * d * v.adjoint() - m))
    }

    /// Rank-one Hermitian matrix on which the bidiagonal SVD fails to
    /// reconstruct its input.
    #[test]
    fn rank_one_hermitian_regression() {
        let x = CVector::from_vec(vec![
            c(0.2523, -0.0007),
            c(-0.2134, 0.4419),
            c(-0.7280, 0.0602),
            c(0.0158, 0.3201),
            c(0.1279, -0.1969),
            c(0.0075, 0.0637),
        ]);
        let m = &x * x.adjoint() * c(4.767, 0.0);
        let svd = svd_sorted(&m);
        assert!(reconstruction(&m, &svd) < 1e-13);
        assert!((svd.1[0] - 4.767 * x.norm_squared()).abs() < 1e-13);
        assert!(svd.1[1] < 1e-14);
        let jac = jacobi_svd(&m);
        assert!(reconstruction(&m, &jac) < 1e-13);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn jacobi_svd_reconstructs(rows in 1usize..9, cols in 1usize..9, rank in 0usize..9, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut rand_matrix = |r: usize, k: usize| {
                CMatrix::from_fn(r, k, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            };
            let r = rank.min(rows).min(cols);
            let m = rand_matrix(rows, r) * rand_matrix(r, cols);
            for svd in [jacobi_svd(&m), svd_sorted(&m)] {
                let k = rows.min(cols);
                prop_assert!(reconstruction(&m, &svd) < 1e-12);
                prop_assert!(max_abs(&(svd.0.adjoint() * &svd.0 - identity(k))) < 1e-12);
                prop_assert!(max_abs(&(svd.2.adjoint() * &svd.2 - identity(k))) < 1e-12);
                prop_assert_eq!(svd.1.iter().filter(|&&s| s > 1e-10).count(), r);
            }
        }
    }
}
