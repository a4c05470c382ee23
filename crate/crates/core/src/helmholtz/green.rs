//! Fundamental solution of the Laplacian on `R^n` and its gradient.

use std::f64::consts::PI;

use crate::algebra::Vector;
use crate::error::{Error, Result};

/// Volume of the unit ball in `R^n`, `pi^(n/2) / Gamma(n/2 + 1)`, via
/// `omega_n = 2 pi omega_(n-2) / n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI * unit_ball_volume(n - 2) / n as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenForm {
    /// `log|x - y| / (2 pi)`, `n = 2`.
    Log,
    /// `|x - y|^(2-n) / (n (2-n) omega_n)`, `n >= 3`.
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenKernel {
    pub n: usize,
    pub form: GreenForm,
    /// Leading constant of the potential.
    pub normalization: f64,
    /// `omega_n`.
    pub omega: f64,
}

impl GreenKernel {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("Green kernel needs n >= 2, got {n}")));
        }
        let omega = unit_ball_volume(n);
        let (form, normalization) = if n == 2 {
            (GreenForm::Log, 1.0 / (2.0 * PI))
        } else {
            (GreenForm::Power, 1.0 / (n as f64 * (2.0 - n as f64) * omega))
        };
        Ok(Self { n, form, normalization, omega })
    }

    /// `1 / (n omega_n)`, the constant of the gradient kernel.
    pub fn gradient_constant(&self) -> f64 {
        1.0 / (self.n as f64 * self.omega)
    }

    fn difference(&self, x: &Vector, y: &Vector) -> Result<(Vec<f64>, f64)> {
        if x.dim() != self.n || y.dim() != self.n {
            return Err(Error::domain(format!(
                "points in R^{} and R^{} for a kernel on R^{}",
                x.dim(),
                y.dim(),
                self.n
            )));
        }
        let d: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a - b).collect();
        let r = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return Err(Error::SingularPoint);
        }
        Ok((d, r))
    }

    pub fn value(&self, x: &Vector, y: &Vector) -> Result<f64> {
        let (_, r) = self.difference(x, y)?;
        Ok(match self.form {
            GreenForm::Log => self.normalization * r.ln(),
            GreenForm::Power => self.normalization * r.powi(2 - self.n as i32),
        })
    }

    /// `nabla_x G = (x - y) / (n omega_n |x - y|^n)`.
    pub fn gradient(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        let (d, r) = self.difference(x, y)?;
        let s = self.gradient_constant() / r.powi(self.n as i32);
        Vector::new(d.into_iter().map(|v| s * v).collect())
    }
}

pub fn green_gradient(n: usize, x: &Vector, y: &Vector) -> Result<Vector> {
    GreenKernel::new(n)?.gradient(x, y)
}
