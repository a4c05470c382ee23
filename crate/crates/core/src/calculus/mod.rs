//! Differential operators on periodic grid fields.
//!
//! Every operator is assembled from two primitives, a first derivative and
//! a pure second derivative along one axis, supplied by a [`Backend`].

mod checks;
mod nye;
mod operators;
mod symbol;

pub use checks::{
    curl_adjoint_curl_identity_residual, integration_by_parts_residual, kernel_residuals,
    matrix_integration_by_parts_residual, matrix_laplacian_decomposition,
    vector_laplacian_decomposition, KernelResiduals, LaplacianSplit,
};
pub use nye::{
    anti, curl3, linear_determinacy, matrix_curl3, nye_check, nye_curl_of_skew_3d,
    nye_recover_gradient_3d, DeterminacyReport, NyeReport,
};
pub use symbol::{
    adjoint_curl_witness_3d, ellipticity_report, symbol, EllipticityReport, SymbolOperator,
};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::spectral::SpectralPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Fourier multipliers `i k` and `-k^2`.
    #[default]
    Spectral,
    /// `(u[+1] - u[-1]) / 2h` and `(u[+1] - 2u + u[-1]) / h^2`.
    Central2,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Spectral => "spectral",
            Backend::Central2 => "central2",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Backend::Spectral),
            "central2" => Ok(Backend::Central2),
            other => Err(Error::config(format!("unknown backend `{other}`"))),
        }
    }
}

/// Operator set bound to one grid and one backend.
#[derive(Debug)]
pub struct Operators {
    grid: Grid,
    backend: Backend,
    plan: Option<SpectralPlan>,
}

impl Operators {
    pub fn new(grid: &Grid, backend: Backend) -> Result<Self> {
        let plan = match backend {
            Backend::Spectral => Some(SpectralPlan::new(grid)?),
            Backend::Central2 => None,
        };
        Ok(Self { grid: grid.clone(), backend, plan })
    }

    pub fn spectral(grid: &Grid) -> Result<Self> {
        Self::new(grid, Backend::Spectral)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// The FFT plan, present for the spectral backend only.
    pub fn plan(&self) -> Option<&SpectralPlan> {
        self.plan.as_ref()
    }

    pub(crate) fn require_plan(&self) -> Result<&SpectralPlan> {
        self.plan
            .as_ref()
            .ok_or_else(|| Error::config("this operation needs the spectral backend"))
    }

    pub(crate) fn check(&self, f: &Field) -> Result<()> {
        if f.grid() != &self.grid {
            return Err(Error::config(format!(
                "field grid {:?} does not match operator grid {:?}",
                f.grid().shape(),
                self.grid.shape()
            )));
        }
        Ok(())
    }

    /// `d u / d x_axis`.
    pub fn d(&self, u: &[f64], axis: usize) -> Vec<f64> {
        match &self.plan {
            Some(plan) => plan.first(u, axis),
            None => {
                let h = self.grid.spacing(axis);
                self.stencil(u, axis, |m, _, p| (p - m) / (2.0 * h))
            }
        }
    }

    /// `d^2 u / d x_axis^2`.
    pub fn d2(&self, u: &[f64], axis: usize) -> Vec<f64> {
        match &self.plan {
            Some(plan) => plan.second(u, axis),
            None => {
                let h = self.grid.spacing(axis);
                self.stencil(u, axis, |m, c, p| (p - 2.0 * c + m) / (h * h))
            }
        }
    }

    /// Applies `f(u[-1], u[0], u[+1])` along `axis` with periodic wrap.
    fn stencil(&self, u: &[f64], axis: usize, f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
        let m = self.grid.shape()[axis];
        let stride = self.grid.stride(axis);
        let block = m * stride;
        let mut out = vec![0.0; u.len()];
        for (src, dst) in u.chunks(block).zip(out.chunks_mut(block)) {
            for t in 0..m {
                let tp = (t + 1) % m;
                let tm = (t + m - 1) % m;
                for j in 0..stride {
                    dst[t * stride + j] = f(src[tm * stride + j], src[t * stride + j], src[tp * stride + j]);
                }
            }
        }
        out
    }

    /// Evaluates many `(component, axis)` first derivatives in parallel.
    pub(crate) fn d_many(&self, tasks: &[(&[f64], usize)]) -> Vec<Vec<f64>> {
        tasks.par_iter().map(|&(u, axis)| self.d(u, axis)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wave(g: &Grid, k: f64) -> Vec<f64> {
        let mut x = vec![0.0; g.n()];
        (0..g.len())
            .map(|p| {
                g.coords(p, &mut x);
                (k * x[1]).sin()
            })
            .collect()
    }

    #[test]
    fn backend_names() {
        assert_eq!("central2".parse::<Backend>().unwrap(), Backend::Central2);
        assert!("fd4".parse::<Backend>().is_err());
        assert_eq!(Backend::default().to_string(), "spectral");
    }

    #[test]
    fn central_stencils_match_symbols() {
        let g = Grid::new(&[6, 16]).unwrap();
        let ops = Operators::new(&g, Backend::Central2).unwrap();
        let h = g.spacing(1);
        let u = wave(&g, 3.0);
        let du = ops.d(&u, 1);
        let d2u = ops.d2(&u, 1);
        let first = (3.0 * h).sin() / h;
        let second = -4.0 * (1.5 * h).sin().powi(2) / (h * h);
        let mut x = vec![0.0; 2];
        for p in 0..g.len() {
            g.coords(p, &mut x);
            assert!((du[p] - first * (3.0 * x[1]).cos()).abs() < 1e-13);
            assert!((d2u[p] - second * (3.0 * x[1]).sin()).abs() < 1e-12);
        }
        assert!(ops.d(&u, 0).iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn spectral_requires_even_grid() {
        let g = Grid::new(&[6, 7]).unwrap();
        assert!(matches!(Operators::spectral(&g), Err(Error::Config(_))));
        assert!(Operators::new(&g, Backend::Central2).is_ok());
    }
}
