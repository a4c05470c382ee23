use nalgebra::{DMatrix, DVector};

use super::pairs::{cross_dim, pair_offset};
use super::types::{CrossMatrix, CrossVector, SkewMatrix, Vector};
use crate::error::{Error, Result};

pub(crate) fn same_dim(a: &Vector, b: &Vector) -> Result<usize> {
    if a.dim() != b.dim() {
        return Err(Error::domain(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(a.dim())
}

/// Appends `a x_n b` to `out` by recursion on the leading `n - 1` coordinates.
fn cross_into(a: &[f64], b: &[f64], out: &mut Vec<f64>) {
    let n = a.len();
    if n == 2 {
        out.push(a[0] * b[1] - a[1] * b[0]);
        return;
    }
    let (a_bar, alpha_n) = (&a[..n - 1], a[n - 1]);
    let (b_bar, beta_n) = (&b[..n - 1], b[n - 1]);
    cross_into(a_bar, b_bar, out);
    out.extend(a_bar.iter().zip(b_bar).map(|(&ai, &bi)| beta_n * ai - alpha_n * bi));
}

/// Generalized cross product `a x_n b` in `R^{n(n-1)/2}`, built inductively:
/// the first `(n-1)(n-2)/2` entries are `a' x_{n-1} b'` for the truncated
/// vectors, followed by `beta_n a' - alpha_n b'`.
pub fn cross(a: &Vector, b: &Vector) -> Result<CrossVector> {
    let n = same_dim(a, b)?;
    let mut out = Vec::with_capacity(cross_dim(n)?);
    cross_into(a.as_slice(), b.as_slice(), &mut out);
    Ok(CrossVector::from_parts(n, DVector::from_vec(out)))
}

/// Coordinate formula for `a x_n b`: entry `(i, j)` is `a_i b_j - a_j b_i`.
///
/// Independent of [`cross`]; kept as its oracle.
pub fn cross_oracle(a: &Vector, b: &Vector) -> Result<CrossVector> {
    let n = same_dim(a, b)?;
    let mut out = DVector::zeros(cross_dim(n)?);
    for j in 1..n {
        for i in 0..j {
            out[pair_offset(i, j)] = a[i] * b[j] - a[j] * b[i];
        }
    }
    Ok(CrossVector::from_parts(n, out))
}

/// The map `a_n`: strict upper triangle of a skew matrix in pair order.
pub fn vec_from_skew(a: &SkewMatrix) -> CrossVector {
    CrossVector::from_parts(a.n(), DVector::from_column_slice(a.upper()))
}

/// The map `A_n`, inverse of [`vec_from_skew`].
pub fn skew_from_vec(v: &CrossVector) -> SkewMatrix {
    SkewMatrix::from_upper(v.n(), v.as_slice().to_vec())
        .expect("cross vector length is triangular by construction")
}

/// Writes `[[a]]_n` into the top-left `N x n` block of `m`.
fn cross_matrix_into(a: &[f64], m: &mut DMatrix<f64>) {
    let n = a.len();
    if n == 2 {
        m[(0, 0)] = -a[1];
        m[(0, 1)] = a[0];
        return;
    }
    cross_matrix_into(&a[..n - 1], m);
    let top = (n - 1) * (n - 2) / 2;
    let alpha_n = a[n - 1];
    for r in 0..n - 1 {
        m[(top + r, r)] = -alpha_n;
        m[(top + r, n - 1)] = a[r];
    }
}

/// `[[a]]_n`, the unique `N x n` matrix with `[[a]]_n b = a x_n b`, built
/// from the block recursion `[[a']]_{n-1}` / `[-alpha_n Id | a']`.
pub fn cross_matrix(a: &Vector) -> CrossMatrix {
    let n = a.dim();
    let mut m = DMatrix::zeros(n * (n - 1) / 2, n);
    cross_matrix_into(a.as_slice(), &mut m);
    CrossMatrix::from_parts(n, m)
}

/// `[[x]]_n` for a plain slice, without the finiteness checks of [`Vector`].
pub(crate) fn cross_matrix_raw(a: &[f64]) -> DMatrix<f64> {
    let n = a.len();
    let mut m = DMatrix::zeros(n * (n - 1) / 2, n);
    cross_matrix_into(a, &mut m);
    m
}
