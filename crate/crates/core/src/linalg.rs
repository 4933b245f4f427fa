//! Small dense complex linear algebra helpers on top of `nalgebra`.

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Determinant; the empty matrix has determinant 1.
pub fn det(a: &CMatrix) -> Complex64 {
    assert_eq!(a.nrows(), a.ncols(), "determinant of a non-square matrix");
    if a.nrows() == 0 {
        return ONE;
    }
    a.clone().lu().determinant()
}

/// Submatrix with the given rows and columns.
pub fn select(a: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])])
}

/// Sum of `|minor|^2` over all minors of order `n`.
///
/// Uses Cauchy–Binet: the sum equals the sum of the principal minors of
/// order `n` of `A A*`.
pub fn minor_energy(a: &CMatrix, n: usize) -> Result<f64> {
    let max = a.nrows().min(a.ncols());
    if n > max {
        return Err(Error::Domain(format!(
            "minor order {n} exceeds min dimension {max} of a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let gram = a * a.adjoint();
    let total: f64 = (0..a.nrows())
        .combinations(n)
        .map(|rows| det(&select(&gram, &rows, &rows)).re)
        .sum();
    Ok(total.max(0.0))
}

/// Cofactor vector of an `(m-1) x m` matrix:
/// `W_k = (-1)^k det(A with column k removed)` (0-based `k`).
///
/// `A W = 0` for every such `A`, and `W` spans the kernel when `A` has full
/// rank.
pub fn cross_product(a: &CMatrix) -> Result<Vec<Complex64>> {
    let m = a.ncols();
    if m == 0 || a.nrows() + 1 != m {
        return Err(Error::Shape(format!(
            "cross product needs an (m-1) x m matrix, got {}x{}",
            a.nrows(),
            m
        )));
    }
    let rows: Vec<usize> = (0..a.nrows()).collect();
    Ok((0..m)
        .map(|k| {
            let cols: Vec<usize> = (0..m).filter(|&c| c != k).collect();
            let d = det(&select(a, &rows, &cols));
            if k % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect())
}

/// Singular values in decreasing order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Spectral condition number `s_max / s_min` over the `min(rows, cols)`
/// singular values; empty matrices are perfectly conditioned.
pub fn condition_number(a: &CMatrix) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

pub fn spectral_norm(a: &CMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Moore–Penrose pseudoinverse.
pub fn pinv(a: &CMatrix) -> CMatrix {
    if a.nrows() == 0 || a.ncols() == 0 {
        return CMatrix::zeros(a.ncols(), a.nrows());
    }
    let s = singular_values(a);
    let eps = s.first().copied().unwrap_or(0.0) * 1e-14 * a.nrows().max(a.ncols()) as f64;
    a.clone()
        .pseudo_inverse(eps)
        .expect("pseudo-inverse with non-negative tolerance")
}

/// Frobenius norm of `A - A*`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    (a - a.adjoint()).norm()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `I - w w* / |w|^2`.
pub fn complement_projection(w: &[Complex64]) -> CMatrix {
    let n = w.len();
    let norm2: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    CMatrix::from_fn(n, n, |i, j| {
        let p = if norm2 > 0.0 { w[i] * w[j].conj() / norm2 } else { ZERO };
        if i == j {
            ONE - p
        } else {
            -p
        }
    })
}
