//! Small dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Largest singular value. Exact for 1x1 and empty matrices.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    if m.iter().all(|z| *z == ZERO) {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `tol`.
pub fn rank(m: &CMat, tol: f64) -> usize {
    singular_values(m).into_iter().filter(|&s| s > tol).count()
}

/// Orthonormal basis (as columns) of the column span of `m`, dropping
/// directions with singular value at most `tol`.
pub fn column_basis(m: &CMat, tol: f64) -> CMat {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 {
        return CMat::zeros(rows, 0);
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol)
        .map(|(i, _)| i)
        .collect();
    CMat::from_fn(rows, keep.len(), |r, c| u[(r, keep[c])])
}

/// Largest distance from a column of `vectors` to the span of the
/// orthonormal columns of `basis`.
pub fn distance_to_span(basis: &CMat, vectors: &CMat) -> f64 {
    if vectors.ncols() == 0 {
        return 0.0;
    }
    let residual = if basis.ncols() == 0 {
        vectors.clone()
    } else {
        vectors - basis * (basis.adjoint() * vectors)
    };
    residual
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0_f64, f64::max)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Least-squares solution of `m z = rhs`, with the residual
/// `max_j |m z_j - rhs_j|`.
///
/// Full-column-rank systems go through the normal equations with a
/// Cholesky factorization, which reproduces the exact inverse when `m^H m`
/// is diagonal with representable entries (as for injective
/// *-homomorphisms written in matrix units). Otherwise the pseudo-inverse
/// with singular-value cutoff `tol` is used.
pub fn least_squares(m: &CMat, rhs: &CMat, tol: f64) -> (CMat, f64) {
    if m.ncols() == 0 {
        let res = rhs.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
        return (CMat::zeros(0, rhs.ncols()), res);
    }
    let mh = m.adjoint();
    let z = match Cholesky::new(&mh * m) {
        Some(ch) if rank(m, tol) == m.ncols() => ch.solve(&(&mh * rhs)),
        _ => SVD::new(m.clone(), true, true)
            .solve(rhs, tol)
            .expect("both singular vector sets requested"),
    };
    let res = (m * &z - rhs)
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    (z, res)
}

/// Operator norm of `m` restricted to the coordinate subspace `cols`.
pub fn restricted_norm(m: &CMat, cols: &[usize]) -> f64 {
    let sub = CMat::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])]);
    spectral_norm(&sub)
}
