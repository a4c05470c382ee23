use std::ops::Deref;

use nalgebra::{DMatrix, DVector};

use super::pairs::{cross_dim, dim_from_cross_len, offset_pair, pair_offset};
use crate::error::{Error, Result};

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(idx) => Err(Error::domain(format!("non-finite entry at index {idx}"))),
        None => Ok(()),
    }
}

/// Dense real vector of dimension `n >= 2` with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(DVector<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        cross_dim(entries.len())?;
        check_finite(&entries)?;
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self> {
        Self::new(entries.to_vec())
    }

    pub fn from_dvector(v: DVector<f64>) -> Result<Self> {
        cross_dim(v.len())?;
        check_finite(v.as_slice())?;
        Ok(Self(v))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    /// The 1-based standard basis vector `e_i` of `R^n`.
    pub fn unit(n: usize, i: usize) -> Result<Self> {
        if i < 1 || i > n {
            return Err(Error::domain(format!("basis index {i} out of range 1..={n}")));
        }
        let mut e = vec![0.0; n];
        e[i - 1] = 1.0;
        Self::new(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }
}

impl Deref for Vector {
    type Target = DVector<f64>;

    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

/// Element of `R^{n(n-1)/2}` labelled by the pairs of an `n`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossVector {
    n: usize,
    data: DVector<f64>,
}

impl CrossVector {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        let len = cross_dim(n)?;
        if entries.len() != len {
            return Err(Error::domain(format!(
                "cross vector for n = {n} needs {len} entries, got {}",
                entries.len()
            )));
        }
        check_finite(&entries)?;
        Ok(Self { n, data: DVector::from_vec(entries) })
    }

    /// Infers `n` from the entry count, which must be triangular.
    pub fn from_entries(entries: Vec<f64>) -> Result<Self> {
        let n = dim_from_cross_len(entries.len())?;
        Self::new(n, entries)
    }

    pub(crate) fn from_parts(n: usize, data: DVector<f64>) -> Self {
        debug_assert_eq!(data.len(), n * (n - 1) / 2);
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; cross_dim(n)?])
    }

    /// Source dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.data
    }

    pub fn as_slice(&self) -> &[f64] {
        self.data.as_slice()
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.data
    }
}

/// Skew-symmetric `n x n` matrix stored as its strict upper triangle in pair order.
///
/// Only the upper triangle exists, so `A^T = -A` holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl SkewMatrix {
    pub fn from_upper(n: usize, upper: Vec<f64>) -> Result<Self> {
        let len = cross_dim(n)?;
        if upper.len() != len {
            return Err(Error::domain(format!(
                "skew matrix for n = {n} needs {len} upper entries, got {}",
                upper.len()
            )));
        }
        check_finite(&upper)?;
        Ok(Self { n, upper })
    }

    /// Reads the strict upper triangle of a square matrix. Fails if `|m + m^T|`
    /// exceeds `tol` anywhere.
    pub fn from_matrix(m: &DMatrix<f64>, tol: f64) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::domain(format!(
                "skew matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if (m[(i, j)] + m[(j, i)]).abs() > tol {
                    return Err(Error::domain(format!(
                        "matrix is not skew-symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let len = cross_dim(n)?;
        let upper = (0..len)
            .map(|k| {
                let (i, j) = offset_pair(k);
                m[(i, j)]
            })
            .collect();
        Self::from_upper(n, upper)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_upper(n, vec![0.0; cross_dim(n)?])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Entry `(i, j)`, 0-based.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Less => self.upper[pair_offset(i, j)],
            Ordering::Greater => -self.upper[pair_offset(j, i)],
            Ordering::Equal => 0.0,
        }
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }
}

/// The `N x n` matrix `[[a]]_n` with `[[a]]_n b = a x_n b`, `N = n(n-1)/2`.
///
/// Stored densely; [`SparseCrossMatrix`] holds the same operator in two
/// entries per row for large `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossMatrix {
    n: usize,
    data: DMatrix<f64>,
}

impl CrossMatrix {
    pub(crate) fn from_parts(n: usize, data: DMatrix<f64>) -> Self {
        debug_assert_eq!(data.shape(), (n * (n - 1) / 2, n));
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn transpose(&self) -> DMatrix<f64> {
        self.data.transpose()
    }

    pub fn mul_vec(&self, b: &Vector) -> Result<CrossVector> {
        if b.dim() != self.n {
            return Err(Error::domain(format!(
                "dimension mismatch: [[a]]_{} applied to vector of dimension {}",
                self.n,
                b.dim()
            )));
        }
        Ok(CrossVector::from_parts(self.n, &self.data * b.as_dvector()))
    }
}

/// Two-entries-per-row form of `[[a]]_n`. Row `(i, j)` holds `a_i` in column
/// `j` and `-a_j` in column `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCrossMatrix {
    n: usize,
    rows: Vec<[(usize, f64); 2]>,
}

impl SparseCrossMatrix {
    pub fn new(a: &Vector) -> Self {
        let n = a.dim();
        let len = n * (n - 1) / 2;
        let rows = (0..len)
            .map(|k| {
                let (i, j) = offset_pair(k);
                [(i, -a[j]), (j, a[i])]
            })
            .collect();
        Self { n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, k: usize) -> [(usize, f64); 2] {
        self.rows[k]
    }

    pub fn mul_vec(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::domain(format!(
                "dimension mismatch: expected {} entries, got {}",
                self.n,
                b.len()
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|r| r[0].1 * b[r[0].0] + r[1].1 * b[r[1].0])
            .collect())
    }

    /// `[[a]]_n^T x` for `x` of length `N`.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows.len() {
            return Err(Error::domain(format!(
                "dimension mismatch: expected {} entries, got {}",
                self.rows.len(),
                x.len()
            )));
        }
        let mut out = vec![0.0; self.n];
        for (r, &xr) in self.rows.iter().zip(x) {
            out[r[0].0] += r[0].1 * xr;
            out[r[1].0] += r[1].1 * xr;
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> CrossMatrix {
        let mut m = DMatrix::zeros(self.rows.len(), self.n);
        for (k, r) in self.rows.iter().enumerate() {
            m[(k, r[0].0)] = r[0].1;
            m[(k, r[1].0)] = r[1].1;
        }
        CrossMatrix::from_parts(self.n, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_rejects_bad_input() {
        assert!(Vector::new(vec![1.0]).is_err());
        assert!(Vector::new(vec![1.0, f64::NAN]).is_err());
        assert!(Vector::new(vec![1.0, f64::INFINITY, 0.0]).is_err());
        assert!(Vector::unit(3, 0).is_err());
        assert_eq!(Vector::unit(3, 2).unwrap().as_slice(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn cross_vector_lengths() {
        assert!(CrossVector::new(3, vec![1.0, 2.0]).is_err());
        assert_eq!(CrossVector::from_entries(vec![0.0; 6]).unwrap().n(), 4);
        assert!(CrossVector::from_entries(vec![0.0; 5]).is_err());
    }

    #[test]
    fn skew_storage_is_skew() {
        let s = SkewMatrix::from_upper(4, (1..=6).map(f64::from).collect()).unwrap();
        let m = s.to_matrix();
        assert_eq!(m.transpose(), -&m);
        // column layout (1,2),(1,3),(2,3),(1,4),(2,4),(3,4)
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(m[(0, 2)], 2.0);
        assert_eq!(m[(1, 2)], 3.0);
        assert_eq!(m[(0, 3)], 4.0);
        assert_eq!(m[(1, 3)], 5.0);
        assert_eq!(m[(2, 3)], 6.0);
        assert_eq!(SkewMatrix::from_matrix(&m, 0.0).unwrap(), s);
    }

    #[test]
    fn from_matrix_rejects_non_skew() {
        let mut m = DMatrix::zeros(3, 3);
        m[(0, 1)] = 1.0;
        assert!(SkewMatrix::from_matrix(&m, 1e-12).is_err());
        assert!(SkewMatrix::from_matrix(&DMatrix::zeros(2, 3), 0.0).is_err());
    }
}
