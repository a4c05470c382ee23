//! Matrix-level products built on `[[.]]_n`: the Grassmann and Jacobi
//! expressions, Room products, cross products with matrices, and the
//! simultaneous/sandwich products.

use nalgebra::DMatrix;

use super::cross::{cross, cross_matrix, same_dim};
use super::pairs::cross_dim;
use super::types::{CrossVector, Vector};
use crate::error::{Error, Result};

fn negated(b: &Vector) -> Vector {
    Vector::from_dvector(-b.as_dvector()).expect("negation keeps entries finite")
}

/// `[[a]]_n^T x`. For `x = b x_n c` this equals `<a,b> c - <a,c> b`.
pub fn grassmann_triple(a: &Vector, bc: &CrossVector) -> Result<Vector> {
    if bc.n() != a.dim() {
        return Err(Error::domain(format!(
            "dimension mismatch: vector in R^{} with cross vector of R^{}",
            a.dim(),
            bc.n()
        )));
    }
    let out = cross_matrix(a).transpose() * bc.as_dvector();
    Ok(Vector::from_dvector(out).expect("finite inputs give finite output"))
}

/// `[[a]]^T (b x c) + [[b]]^T (c x a) + [[c]]^T (a x b)`, identically zero.
pub fn jacobi_sum(a: &Vector, b: &Vector, c: &Vector) -> Result<Vector> {
    same_dim(a, b)?;
    same_dim(a, c)?;
    let t1 = grassmann_triple(a, &cross(b, c)?)?;
    let t2 = grassmann_triple(b, &cross(c, a)?)?;
    let t3 = grassmann_triple(c, &cross(a, b)?)?;
    Ok(Vector::from_dvector(t1.as_dvector() + t2.as_dvector() + t3.as_dvector())
        .expect("finite"))
}

/// `[[a]]_n^T [[b]]_n`, which equals `<b,a> Id_n - b (x) a`.
pub fn room_product(a: &Vector, b: &Vector) -> Result<DMatrix<f64>> {
    same_dim(a, b)?;
    Ok(cross_matrix(a).transpose() * cross_matrix(b).as_matrix())
}

/// Recovers `b (x) a` from the Room product:
/// `tr([[a]]^T [[b]]) / (n - 1) Id_n - [[a]]^T [[b]]`.
pub fn dyad_from_room(a: &Vector, b: &Vector) -> Result<DMatrix<f64>> {
    let n = a.dim();
    let room = room_product(a, b)?;
    let scale = room.trace() / (n - 1) as f64;
    Ok(DMatrix::identity(n, n) * scale - room)
}

/// Row-wise cross product `P x_n b = P [[-b]]_n^T` for `P` of size `m x n`.
pub fn cross_right(p: &DMatrix<f64>, b: &Vector) -> Result<DMatrix<f64>> {
    if p.ncols() != b.dim() {
        return Err(Error::domain(format!(
            "dimension mismatch: matrix with {} columns crossed with vector in R^{}",
            p.ncols(),
            b.dim()
        )));
    }
    Ok(p * cross_matrix(&negated(b)).transpose())
}

/// Column-wise cross product `b x_n B = [[b]]_n B` for `B` of size `n x m`.
pub fn cross_left(b: &Vector, bm: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if bm.nrows() != b.dim() {
        return Err(Error::domain(format!(
            "dimension mismatch: vector in R^{} crossed with matrix with {} rows",
            b.dim(),
            bm.nrows()
        )));
    }
    Ok(cross_matrix(b).as_matrix() * bm)
}

/// `[[a]]_n x_n b = [[a]]_n [[-b]]_n^T`, an `N x N` matrix.
pub fn matrix_cross_block(a: &Vector, b: &Vector) -> Result<DMatrix<f64>> {
    same_dim(a, b)?;
    Ok(cross_matrix(a).as_matrix() * cross_matrix(&negated(b)).transpose())
}

/// Simultaneous cross product `b x_n P x_n b = [[b]]_n P [[-b]]_n^T`.
pub fn simultaneous_cross(b: &Vector, p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = b.dim();
    if p.shape() != (n, n) {
        return Err(Error::domain(format!(
            "expected {n}x{n} matrix, got {}x{}",
            p.nrows(),
            p.ncols()
        )));
    }
    let cb = cross_matrix(b);
    Ok(-(cb.as_matrix() * p * cb.transpose()))
}

/// `[[b]]_n^T Q [[b]]_n` for an `N x N` matrix `Q`.
pub fn sandwich(b: &Vector, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let big = cross_dim(b.dim())?;
    if q.shape() != (big, big) {
        return Err(Error::domain(format!(
            "expected {big}x{big} matrix, got {}x{}",
            q.nrows(),
            q.ncols()
        )));
    }
    let cb = cross_matrix(b);
    Ok(cb.transpose() * q * cb.as_matrix())
}
