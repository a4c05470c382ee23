//! Helmholtz decomposition `a = a_curlfree + a_divfree` in `n` dimensions.
//!
//! Two methods are provided: Fourier projectors on the torus, and a
//! Riesz-potential quadrature of the full-space representation for fields
//! with numerically compact support.

mod green;
mod riesz;
mod spectral;

pub use green::{green_gradient, unit_ball_volume, GreenForm, GreenKernel};
pub use riesz::{riesz_decompose, RieszOptions};
pub use spectral::{projector_completeness, spectral_decompose};

use std::fmt::{self, Write as _};

use crate::calculus::Operators;
use crate::error::Result;
use crate::field::{Field, FieldKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Spectral,
    Riesz,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Spectral => "spectral",
            Method::Riesz => "riesz",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// `max |a - a_curlfree - a_divfree - mean|`.
    pub sum_residual: f64,
    /// `max |div a_divfree|`.
    pub div_divfree: f64,
    /// `max |curl_n a_curlfree|`.
    pub curl_curlfree: f64,
    pub max_abs_input: f64,
    pub max_abs_curlfree: f64,
    pub max_abs_divfree: f64,
}

#[derive(Debug, Clone)]
pub struct HelmholtzResult {
    pub method: Method,
    pub a_curlfree: Field,
    pub a_divfree: Field,
    /// Mean of each component, assigned to neither part.
    pub mean_mode: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl HelmholtzResult {
    pub(crate) fn assemble(
        ops: &Operators,
        method: Method,
        a: &Field,
        a_curlfree: Field,
        a_divfree: Field,
        mean_mode: Vec<f64>,
    ) -> Result<Self> {
        let mut sum = a_curlfree.add(&a_divfree)?;
        for (c, m) in mean_mode.iter().enumerate() {
            sum.component_mut(c).iter_mut().for_each(|x| *x += m);
        }
        let diagnostics = Diagnostics {
            sum_residual: a.max_abs_diff(&sum)?,
            div_divfree: ops.div(&a_divfree)?.max_abs(),
            curl_curlfree: ops.curl_n(&a_curlfree)?.max_abs(),
            max_abs_input: a.max_abs(),
            max_abs_curlfree: a_curlfree.max_abs(),
            max_abs_divfree: a_divfree.max_abs(),
        };
        Ok(Self { method, a_curlfree, a_divfree, mean_mode, diagnostics })
    }

    /// Diagnostics as `key=value` lines.
    pub fn records(&self) -> String {
        let d = &self.diagnostics;
        let mut out = String::new();
        let _ = writeln!(out, "method={}", self.method);
        let mean: Vec<String> = self.mean_mode.iter().map(|m| format!("{m:.6e}")).collect();
        let _ = writeln!(out, "mean_mode={}", mean.join(","));
        for (key, value) in [
            ("sum_residual", d.sum_residual),
            ("div_divfree", d.div_divfree),
            ("curl_curlfree", d.curl_curlfree),
            ("max_abs_input", d.max_abs_input),
            ("max_abs_curlfree", d.max_abs_curlfree),
            ("max_abs_divfree", d.max_abs_divfree),
        ] {
            let _ = writeln!(out, "{key}={value:.6e}");
        }
        out
    }
}

/// `|a - b|_2 / |b|_2`.
pub fn relative_l2(a: &Field, b: &Field) -> Result<f64> {
    Ok(a.sub(b)?.l2_norm() / b.l2_norm())
}

/// Gaussian `exp(-|x - c|^2 / (2 sigma^2))` centred in the box.
pub fn gaussian_bump(ops: &Operators, sigma: f64) -> Result<Field> {
    let c = std::f64::consts::PI;
    Field::sample_scalar(ops.grid(), |x| {
        let r2: f64 = x.iter().map(|xi| (xi - c).powi(2)).sum();
        (-r2 / (2.0 * sigma * sigma)).exp()
    })
}

/// `nabla` of a centred Gaussian bump: a curl-free, compactly supported field.
pub fn bump_gradient(ops: &Operators, sigma: f64) -> Result<Field> {
    ops.grad(&gaussian_bump(ops, sigma)?)
}

/// `[[nabla]]_n^T` of a cross field carrying a Gaussian bump in its first
/// component: a divergence-free, compactly supported field.
pub fn bump_divfree(ops: &Operators, sigma: f64) -> Result<Field> {
    let g = ops.grid();
    let bump = gaussian_bump(ops, sigma)?;
    let mut x = Field::zeros(g, FieldKind::Cross);
    x.component_mut(0).copy_from_slice(bump.data());
    ops.adjoint_curl(&x)
}
