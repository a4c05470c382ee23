//! Cached FFT machinery for a periodic grid.
//!
//! Wavenumbers follow the usual ordering: index `t` carries `k = t` for
//! `t < N/2` and `k = t - N` otherwise, so the Nyquist index `N/2` carries
//! `-N/2`. Odd-order multipliers zero the Nyquist mode; second-order
//! multipliers keep it.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Signed integer wavenumber of FFT index `t` on an axis with `m` points.
pub fn wavenumber(t: usize, m: usize) -> i64 {
    if t < m / 2 {
        t as i64
    } else {
        t as i64 - m as i64
    }
}

/// Wavenumber used by first-derivative multipliers: Nyquist zeroed.
pub fn wavenumber_odd(t: usize, m: usize) -> f64 {
    if m.is_multiple_of(2) && t == m / 2 {
        0.0
    } else {
        wavenumber(t, m) as f64
    }
}

struct AxisPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

pub struct SpectralPlan {
    grid: Grid,
    axes: Vec<AxisPlan>,
}

impl std::fmt::Debug for SpectralPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan").field("grid", &self.grid).finish()
    }
}

impl SpectralPlan {
    pub fn new(grid: &Grid) -> Result<Self> {
        if !grid.supports_spectral() {
            return Err(Error::config(format!(
                "spectral backend needs every axis even and at least 4, got {:?}",
                grid.shape()
            )));
        }
        let mut planner = FftPlanner::new();
        let axes = grid
            .shape()
            .iter()
            .map(|&m| AxisPlan {
                forward: planner.plan_fft_forward(m),
                inverse: planner.plan_fft_inverse(m),
            })
            .collect();
        Ok(Self { grid: grid.clone(), axes })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Gathers every line along `axis` into contiguous storage, hands the
    /// line-major buffer to `f`, and scatters it back.
    fn along_axis(&self, data: &mut [Complex64], axis: usize, f: impl FnOnce(&mut [Complex64])) {
        let m = self.grid.shape()[axis];
        let stride = self.grid.stride(axis);
        if stride == 1 {
            f(data);
            return;
        }
        let block = m * stride;
        let mut lines = vec![Complex64::default(); data.len()];
        for (b, chunk) in data.chunks(block).enumerate() {
            for j in 0..stride {
                let line = &mut lines[(b * stride + j) * m..][..m];
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = chunk[t * stride + j];
                }
            }
        }
        f(&mut lines);
        for (b, chunk) in data.chunks_mut(block).enumerate() {
            for j in 0..stride {
                let line = &lines[(b * stride + j) * m..][..m];
                for (t, v) in line.iter().enumerate() {
                    chunk[t * stride + j] = *v;
                }
            }
        }
    }

    /// Unnormalised forward transform along every axis.
    pub fn forward(&self, data: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward_complex(&mut buf);
        buf
    }

    pub fn forward_complex(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.grid.len());
        for (axis, plan) in self.axes.iter().enumerate() {
            self.along_axis(buf, axis, |lines| plan.forward.process(lines));
        }
    }

    /// Normalised inverse transform along every axis.
    pub fn inverse_complex(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.grid.len());
        for (axis, plan) in self.axes.iter().enumerate() {
            self.along_axis(buf, axis, |lines| plan.inverse.process(lines));
        }
        let scale = 1.0 / self.grid.len() as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
    }

    /// Real part of the normalised inverse transform.
    pub fn inverse_real(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.inverse_complex(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Applies the diagonal multiplier `mult(t)` along `axis` only.
    fn axis_multiplier(&self, u: &[f64], axis: usize, mult: impl Fn(usize) -> Complex64) -> Vec<f64> {
        let m = self.grid.shape()[axis];
        let table: Vec<Complex64> = (0..m).map(mult).collect();
        let plan = &self.axes[axis];
        let mut buf: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.along_axis(&mut buf, axis, |lines| {
            plan.forward.process(lines);
            for line in lines.chunks_mut(m) {
                for (z, w) in line.iter_mut().zip(&table) {
                    *z *= w;
                }
            }
            plan.inverse.process(lines);
        });
        let scale = 1.0 / m as f64;
        buf.into_iter().map(|z| z.re * scale).collect()
    }

    /// `d/dx_axis` with multiplier `i k`, Nyquist zeroed.
    pub fn first(&self, u: &[f64], axis: usize) -> Vec<f64> {
        let m = self.grid.shape()[axis];
        self.axis_multiplier(u, axis, |t| Complex64::new(0.0, wavenumber_odd(t, m)))
    }

    /// `d^2/dx_axis^2` with multiplier `-k^2`.
    pub fn second(&self, u: &[f64], axis: usize) -> Vec<f64> {
        let m = self.grid.shape()[axis];
        self.axis_multiplier(u, axis, |t| {
            let k = wavenumber(t, m) as f64;
            Complex64::new(-k * k, 0.0)
        })
    }

    /// Signed wavevector of a flat spectral index.
    pub fn wavevector(&self, flat: usize, out: &mut [i64]) {
        let mut idx = vec![0; self.grid.n()];
        self.grid.multi_index(flat, &mut idx);
        for ((o, &t), &m) in out.iter_mut().zip(&idx).zip(self.grid.shape()) {
            *o = wavenumber(t, m);
        }
    }

    /// Wavevector with Nyquist components zeroed.
    pub fn wavevector_odd(&self, flat: usize, out: &mut [f64]) {
        let mut idx = vec![0; self.grid.n()];
        self.grid.multi_index(flat, &mut idx);
        for ((o, &t), &m) in out.iter_mut().zip(&idx).zip(self.grid.shape()) {
            *o = wavenumber_odd(t, m);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wavenumber_tables() {
        let ks: Vec<i64> = (0..8).map(|t| wavenumber(t, 8)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(wavenumber_odd(4, 8), 0.0);
        assert_eq!(wavenumber_odd(5, 8), -3.0);
    }

    #[test]
    fn round_trip_and_derivatives() {
        let g = Grid::new(&[8, 12]).unwrap();
        let plan = SpectralPlan::new(&g).unwrap();
        let mut x = [0.0; 2];
        let u: Vec<f64> = (0..g.len())
            .map(|p| {
                g.coords(p, &mut x);
                (2.0 * x[0]).sin() * (3.0 * x[1]).cos() + 0.5
            })
            .collect();
        let back = plan.inverse_real(plan.forward(&u));
        for (a, b) in u.iter().zip(&back) {
            assert!((a - b).abs() < 1e-14);
        }
        let du = plan.first(&u, 1);
        let d2u = plan.second(&u, 0);
        for p in 0..g.len() {
            g.coords(p, &mut x);
            let exact = -3.0 * (2.0 * x[0]).sin() * (3.0 * x[1]).sin();
            assert!((du[p] - exact).abs() < 1e-13);
            let exact2 = -4.0 * (2.0 * x[0]).sin() * (3.0 * x[1]).cos();
            assert!((d2u[p] - exact2).abs() < 1e-12);
        }
    }

    #[test]
    fn nyquist_conventions() {
        let g = Grid::uniform(2, 8).unwrap();
        let plan = SpectralPlan::new(&g).unwrap();
        let mut x = [0.0; 2];
        let u: Vec<f64> = (0..g.len())
            .map(|p| {
                g.coords(p, &mut x);
                (4.0 * x[0]).cos()
            })
            .collect();
        assert!(plan.first(&u, 0).iter().all(|v| v.abs() < 1e-13));
        let d2 = plan.second(&u, 0);
        for (a, b) in d2.iter().zip(&u) {
            assert!((a + 16.0 * b).abs() < 1e-12);
        }
        let mut k = [0i64; 2];
        plan.wavevector(4 * 8 + 7, &mut k);
        assert_eq!(k, [-4, -1]);
        let mut kt = [0.0; 2];
        plan.wavevector_odd(4 * 8 + 7, &mut kt);
        assert_eq!(kt, [0.0, -1.0]);
        assert!((2.0 * PI / 8.0 - g.spacing(0)).abs() < 1e-15);
    }

    #[test]
    fn rejects_odd_grids() {
        assert!(SpectralPlan::new(&Grid::new(&[8, 9]).unwrap()).is_err());
    }
}
