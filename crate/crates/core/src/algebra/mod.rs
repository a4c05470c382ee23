//! Generalized cross product `x_n : R^n x R^n -> R^{n(n-1)/2}`, its matrix
//! representation `[[a]]_n`, the bijections between skew matrices and
//! `R^{n(n-1)/2}`, and the products built on them.

mod cross;
pub mod identities;
mod pairs;
mod products;
mod types;

pub use cross::{cross, cross_matrix, cross_oracle, skew_from_vec, vec_from_skew};
pub(crate) use cross::cross_matrix_raw;
pub use pairs::{
    cross_dim, dim_from_cross_len, index_to_pair, offset_pair, pair_offset, pair_to_index,
    PairIndexMap,
};
pub use products::{
    cross_left, cross_right, dyad_from_room, grassmann_triple, jacobi_sum, matrix_cross_block,
    room_product, sandwich, simultaneous_cross,
};
pub use types::{CrossMatrix, CrossVector, SkewMatrix, SparseCrossMatrix, Vector};

use nalgebra::{DMatrix, DVector};

/// Dyadic product `a (x) b = a b^T`.
pub fn outer(a: &DVector<f64>, b: &DVector<f64>) -> DMatrix<f64> {
    a * b.transpose()
}

pub fn sym(p: &DMatrix<f64>) -> DMatrix<f64> {
    (p + p.transpose()) * 0.5
}

pub fn skew(p: &DMatrix<f64>) -> DMatrix<f64> {
    (p - p.transpose()) * 0.5
}
