//! Small dense linear algebra helpers.
//!
//! Everything here works on `nalgebra` dynamic matrices. Rank and null-space
//! decisions go through the SVD; symmetric eigenproblems use cyclic Jacobi
//! rotations, which are accurate and deterministic at the sizes this crate
//! deals with (n <= 10 or so).

use nalgebra::{DMatrix, DVector};

/// Off-diagonal Frobenius norm (relative to the full norm) at which the
/// Jacobi sweep stops.
pub const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in ascending order.
    pub values: DVector<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: DMatrix<f64>,
}

/// Cyclic Jacobi eigenvalue iteration.
///
/// The input is symmetrized first. Rotations are applied until the
/// off-diagonal norm drops below `JACOBI_TOL` times the Frobenius norm.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> SymmetricEigen {
    assert!(a.is_square(), "jacobi_eigen needs a square matrix");
    let n = a.nrows();
    let mut m = (a + a.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = m.norm();

    if scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            if off_diagonal_norm(&m) <= JACOBI_TOL * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = m[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = m[(p, p)];
                    let aqq = m[(q, q)];
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let t = if tau == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;

                    for k in 0..n {
                        let mkp = m[(k, p)];
                        let mkq = m[(k, q)];
                        m[(k, p)] = c * mkp - s * mkq;
                        m[(k, q)] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[(p, k)];
                        let mqk = m[(q, k)];
                        m[(p, k)] = c * mpk - s * mqk;
                        m[(q, k)] = s * mpk + c * mqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| m[(i, i)]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut e = v.column(i).clone_owned();
        canonical_sign(&mut e);
        vectors.set_column(col, &e);
    }
    SymmetricEigen { values, vectors }
}

fn off_diagonal_norm(m: &DMatrix<f64>) -> f64 {
    let mut s = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Flip `v` so that its largest-magnitude entry (first one on ties) is positive.
pub fn canonical_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for i in 0..v.len() {
        if v[i].abs() > v[best].abs() * (1.0 + 1e-12) {
            best = i;
        }
    }
    if v.len() > 0 && v[best] < 0.0 {
        v.neg_mut();
    }
}

/// Singular values in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Numerical rank: number of singular values above `tol`.
pub fn rank(a: &DMatrix<f64>, tol: f64) -> usize {
    singular_values(a).into_iter().filter(|&s| s > tol).count()
}

/// Orthonormal basis (as columns) of the null space of `a`, using singular
/// values `<= tol` as zero.
pub fn null_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = a.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    // Pad with zero rows so the SVD returns a full n x n right factor.
    let rows = a.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&i| svd.singular_values[i] <= tol)
        .map(|i| vt.row(i).transpose())
        .collect();
    columns_to_matrix(n, &cols)
}

/// Orthonormal basis (as columns) of the span of the given vectors.
pub fn span_basis(n: usize, vectors: &[DVector<f64>], tol: f64) -> DMatrix<f64> {
    if vectors.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    let m = columns_to_matrix(n, vectors);
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested u");
    let cols: Vec<DVector<f64>> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .map(|i| u.column(i).clone_owned())
        .collect();
    columns_to_matrix(n, &cols)
}

pub fn columns_to_matrix(n: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

pub fn matrix_columns(m: &DMatrix<f64>) -> Vec<DVector<f64>> {
    (0..m.ncols()).map(|j| m.column(j).clone_owned()).collect()
}

/// Reduced row echelon form of the row space of `rows` (one vector per row),
/// dropping zero rows. Used to pick readable, deterministic subspace bases.
pub fn rref_rows(rows: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let mut a = rows.clone();
    let (nr, nc) = a.shape();
    let mut pivot_row = 0;
    for col in 0..nc {
        if pivot_row >= nr {
            break;
        }
        let (best, best_val) = (pivot_row..nr)
            .map(|r| (r, a[(r, col)].abs()))
            .fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_val <= tol {
            continue;
        }
        a.swap_rows(pivot_row, best);
        let p = a[(pivot_row, col)];
        for c in 0..nc {
            a[(pivot_row, c)] /= p;
        }
        for r in 0..nr {
            if r != pivot_row {
                let f = a[(r, col)];
                if f != 0.0 {
                    for c in 0..nc {
                        a[(r, c)] -= f * a[(pivot_row, c)];
                    }
                }
            }
        }
        pivot_row += 1;
    }
    let mut out = a.rows(0, pivot_row).clone_owned();
    out.iter_mut().for_each(|x| {
        if x.abs() <= tol {
            *x = 0.0;
        }
    });
    out
}

/// Distance from `v` to the span of the orthonormal columns of `basis`.
pub fn distance_to_span(basis: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    if basis.ncols() == 0 {
        return v.norm();
    }
    let proj = basis * (basis.transpose() * v);
    (v - proj).norm()
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    a.clone().cholesky().map(|c| c.l())
}

pub fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_reconstructs_random_symmetric() {
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[
                4.0, 1.0, -2.0, 0.5, 1.0, 3.0, 0.0, 1.5, -2.0, 0.0, -1.0, 2.0, 0.5, 1.5, 2.0, 0.0,
            ],
        );
        let e = jacobi_eigen(&a);
        let recon = &e.vectors * DMatrix::from_diagonal(&e.values) * e.vectors.transpose();
        assert!((recon - &a).norm() < 1e-12);
        let gram = e.vectors.transpose() * &e.vectors;
        assert!((gram - DMatrix::identity(4, 4)).norm() < 1e-12);
        assert!(e.values.as_slice().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn jacobi_on_zero_and_diagonal() {
        let e = jacobi_eigen(&DMatrix::zeros(3, 3));
        assert_eq!(e.values, DVector::zeros(3));
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0]));
        let e = jacobi_eigen(&d);
        assert_eq!(e.values.as_slice(), &[-1.0, 2.0, 3.0]);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let a = DMatrix::from_row_slice(1, 3, &[0.0, 0.0, -2.0]);
        let ns = null_space(&a, 1e-9);
        assert_eq!(ns.ncols(), 2);
        assert!((&a * &ns).norm() < 1e-12);
    }

    #[test]
    fn rref_picks_readable_basis() {
        let rows = DMatrix::from_row_slice(2, 3, &[0.6, 0.8, 0.0, -0.8, 0.6, 0.0]);
        let r = rref_rows(&rows, 1e-10);
        assert!((r - DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0])).norm() < 1e-14);
    }
}
