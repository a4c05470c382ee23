//! Uniform periodic grids over the flat torus `[0, 2pi)^n`.
//!
//! Samples are stored row-major with the last axis varying fastest.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default cap on the number of grid samples.
pub const DEFAULT_BUDGET: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    shape: Vec<usize>,
    len: usize,
}

impl Grid {
    /// Grid with the given points per axis and the default sample budget.
    pub fn new(shape: &[usize]) -> Result<Self> {
        Self::with_budget(shape, DEFAULT_BUDGET)
    }

    /// Grid with `m` points along each of `n` axes.
    pub fn uniform(n: usize, m: usize) -> Result<Self> {
        Self::new(&vec![m; n])
    }

    pub fn with_budget(shape: &[usize], budget: usize) -> Result<Self> {
        if shape.len() < 2 {
            return Err(Error::domain(format!(
                "grid dimension must be at least 2, got {}",
                shape.len()
            )));
        }
        if let Some(&m) = shape.iter().find(|&&m| m < 3) {
            return Err(Error::domain(format!(
                "every axis needs at least 3 points, got {m}"
            )));
        }
        let len = shape
            .iter()
            .try_fold(1usize, |acc, &m| acc.checked_mul(m))
            .filter(|&len| len <= budget)
            .ok_or_else(|| {
                Error::config(format!(
                    "grid {} exceeds the sample budget of {budget}",
                    shape_string(shape)
                ))
            })?;
        Ok(Self { shape: shape.to_vec(), len })
    }

    pub fn n(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * PI / self.shape[axis] as f64
    }

    /// Volume of one grid cell, the quadrature weight.
    pub fn cell_volume(&self) -> f64 {
        (0..self.n()).map(|a| self.spacing(a)).product()
    }

    /// Distance in the flat storage between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.shape[axis + 1..].iter().product()
    }

    /// Multi-index of a flat sample index.
    pub fn multi_index(&self, mut flat: usize, out: &mut [usize]) {
        for axis in (0..self.n()).rev() {
            out[axis] = flat % self.shape[axis];
            flat /= self.shape[axis];
        }
    }

    /// Coordinates of a flat sample index.
    pub fn coords(&self, flat: usize, out: &mut [f64]) {
        let mut idx = vec![0; self.n()];
        self.multi_index(flat, &mut idx);
        for (axis, (o, i)) in out.iter_mut().zip(&idx).enumerate() {
            *o = *i as f64 * self.spacing(axis);
        }
    }

    /// True when every axis is even and has at least 4 points.
    pub fn supports_spectral(&self) -> bool {
        self.shape.iter().all(|&m| m >= 4 && m % 2 == 0)
    }

    /// Same number of axes, every axis refined by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let shape: Vec<usize> = self.shape.iter().map(|m| m * factor).collect();
        Self::new(&shape)
    }
}

pub(crate) fn shape_string(shape: &[usize]) -> String {
    shape.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("x")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_last_axis_fastest() {
        let g = Grid::new(&[4, 6, 8]).unwrap();
        assert_eq!(g.len(), 192);
        assert_eq!(g.stride(0), 48);
        assert_eq!(g.stride(2), 1);
        let mut idx = [0; 3];
        g.multi_index(48 + 8 * 2 + 5, &mut idx);
        assert_eq!(idx, [1, 2, 5]);
        let mut x = [0.0; 3];
        g.coords(1, &mut x);
        assert_eq!(x, [0.0, 0.0, 2.0 * PI / 8.0]);
    }

    #[test]
    fn budget_and_shape_checks() {
        assert!(Grid::uniform(6, 32).is_err());
        assert!(matches!(Grid::uniform(6, 32), Err(Error::Config(_))));
        assert!(Grid::uniform(1, 8).is_err());
        assert!(Grid::new(&[8, 2]).is_err());
        assert!(Grid::with_budget(&[8, 8], 63).is_err());
        assert!(Grid::with_budget(&[8, 8], 64).is_ok());
        assert!(Grid::new(&[usize::MAX, 4]).is_err());
    }

    #[test]
    fn spectral_support_and_cells() {
        assert!(Grid::uniform(2, 8).unwrap().supports_spectral());
        assert!(!Grid::new(&[8, 9]).unwrap().supports_spectral());
        let g = Grid::uniform(2, 4).unwrap();
        assert!((g.cell_volume() * g.len() as f64 - 4.0 * PI * PI).abs() < 1e-12);
        assert_eq!(g.refined(2).unwrap().shape(), &[8, 8]);
    }
}
