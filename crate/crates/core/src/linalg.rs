//! Dense complex helpers: nalgebra matrices for storage and arithmetic,
//! faer for the decompositions (SVD, eigenvalues, symmetric eigenpairs).
//! On top of those sit null spaces, orthonormal bases, principal angles and
//! minimal-norm solves.

use alloc::vec::Vec;

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("singular value decomposition did not converge")]
    SvdFailed,
    #[error("eigenvalue iteration did not converge")]
    EigenFailed,
}

pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(real)
}

pub fn sup_norm(v: &CVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn to_faer(m: &CMatrix) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full SVD `m = U diag(s) V*` with `s` in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(m: &CMatrix) -> Result<Svd, LinalgError> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(Svd {
            u: CMatrix::identity(rows, rows),
            singular_values: Vec::new(),
            v: CMatrix::identity(cols, cols),
        });
    }
    let dec = to_faer(m).svd().map_err(|_| LinalgError::SvdFailed)?;
    let (u, s, v) = (dec.U(), dec.S(), dec.V());
    let k = rows.min(cols);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].re.total_cmp(&s[a].re));
    let mut u_out = CMatrix::from_fn(rows, rows, |i, j| u[(i, j)]);
    let mut v_out = CMatrix::from_fn(cols, cols, |i, j| v[(i, j)]);
    for (dst, &src) in order.iter().enumerate() {
        u_out.set_column(dst, &CVector::from_fn(rows, |i, _| u[(i, src)]));
        v_out.set_column(dst, &CVector::from_fn(cols, |i, _| v[(i, src)]));
    }
    let singular_values = order.iter().map(|&i| s[i].re).collect();
    Ok(Svd {
        u: u_out,
        singular_values,
        v: v_out,
    })
}

/// Eigenvalues of a square complex matrix.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>, LinalgError> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    to_faer(m)
        .eigenvalues()
        .map_err(|_| LinalgError::EigenFailed)
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a real
/// symmetric matrix.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>), LinalgError> {
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let a = Mat::from_fn(n, n, |i, j| m[(i, j)]);
    let dec = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LinalgError::EigenFailed)?;
    let (u, s) = (dec.U(), dec.S());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| s[x].total_cmp(&s[y]));
    let values = order.iter().map(|&i| s[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    Ok((values, vectors))
}

/// Singular values of `m` in descending order.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>, LinalgError> {
    Ok(svd(m)?.singular_values)
}

/// Orthonormal basis (as columns) of the null space of `m`. A singular value
/// counts as zero when it is below `tol * max(1, sigma_max)`.
pub fn null_space(m: &CMatrix, tol: f64) -> Result<CMatrix, LinalgError> {
    let cols = m.ncols();
    let dec = svd(m)?;
    let sigma_max = dec.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = tol * sigma_max.max(1.0);
    let rank = dec.singular_values.iter().filter(|&&s| s >= cutoff).count();
    Ok(dec.v.columns(rank, cols - rank).into_owned())
}

/// Right singular vector belonging to the smallest singular value.
pub fn smallest_right_singular_vector(m: &CMatrix) -> Result<CVector, LinalgError> {
    let dec = svd(m)?;
    let last = m.ncols().checked_sub(1).ok_or(LinalgError::SvdFailed)?;
    // with more columns than rows, trailing columns of V are exact null vectors
    Ok(dec.v.column(last).into_owned())
}

/// Orthonormal basis of the span of `vectors`, dropping directions whose
/// singular value falls below `tol` relative to the largest.
pub fn orthonormal_basis(
    dim: usize,
    vectors: &[CVector],
    tol: f64,
) -> Result<CMatrix, LinalgError> {
    if vectors.is_empty() || dim == 0 {
        return Ok(CMatrix::zeros(dim, 0));
    }
    let dec = svd(&from_columns(dim, vectors))?;
    let sigma_max = dec.singular_values.first().copied().unwrap_or(0.0);
    let rank = dec
        .singular_values
        .iter()
        .filter(|&&s| sigma_max > 0.0 && s > tol * sigma_max)
        .count();
    Ok(dec.u.columns(0, rank).into_owned())
}

/// Orthonormal basis of the column space of `m` restricted to its `rank`
/// dominant left singular vectors.
pub fn dominant_range(m: &CMatrix, rank: usize) -> Result<CMatrix, LinalgError> {
    let dim = m.nrows();
    if rank == 0 || m.is_empty() {
        return Ok(CMatrix::zeros(dim, 0));
    }
    let dec = svd(m)?;
    Ok(dec.u.columns(0, rank.min(dim)).into_owned())
}

pub fn from_columns(dim: usize, columns: &[CVector]) -> CMatrix {
    let mut m = CMatrix::zeros(dim, columns.len());
    for (j, c) in columns.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Sine of the largest principal angle between the spans of two matrices
/// with orthonormal columns. Returns 1 when the dimensions differ.
pub fn max_principal_sine(q1: &CMatrix, q2: &CMatrix) -> Result<f64, LinalgError> {
    if q1.ncols() != q2.ncols() {
        return Ok(1.0);
    }
    if q1.ncols() == 0 {
        return Ok(0.0);
    }
    let r12 = q2 - q1 * (q1.adjoint() * q2);
    let r21 = q1 - q2 * (q2.adjoint() * q1);
    let s12 = singular_values(&r12)?.first().copied().unwrap_or(0.0);
    let s21 = singular_values(&r21)?.first().copied().unwrap_or(0.0);
    Ok(s12.max(s21))
}

/// Minimal-norm least-squares solution of `a x = b`, treating singular values
/// below `tol * sigma_max` as zero.
pub fn min_norm_solve(a: &CMatrix, b: &CVector, tol: f64) -> Result<CVector, LinalgError> {
    let cols = a.ncols();
    if cols == 0 {
        return Ok(CVector::zeros(0));
    }
    let dec = svd(a)?;
    let sigma_max = dec.singular_values.first().copied().unwrap_or(0.0);
    let mut x = CVector::zeros(cols);
    for (j, &s) in dec.singular_values.iter().enumerate() {
        if s > tol * sigma_max && s > 0.0 {
            let coeff = dec.u.column(j).dotc(b) / s;
            x += dec.v.column(j) * coeff;
        }
    }
    Ok(x)
}
