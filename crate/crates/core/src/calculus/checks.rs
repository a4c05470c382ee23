//! Residuals of the operator identities.
//!
//! Every residual is an absolute sup-norm (or absolute integral) value; the
//! callers normalise their input fields.

use super::Operators;
use crate::error::Result;
use crate::field::{Field, FieldKind};

/// `Delta a = nabla div a + [[nabla]]^T curl_n a`, term by term.
#[derive(Debug, Clone)]
pub struct LaplacianSplit {
    pub grad_div: Field,
    pub adjoint_curl_curl: Field,
    /// `max |Delta a - grad_div - adjoint_curl_curl|`.
    pub residual: f64,
}

pub fn vector_laplacian_decomposition(ops: &Operators, a: &Field) -> Result<LaplacianSplit> {
    let grad_div = ops.grad(&ops.div(a)?)?;
    let adjoint_curl_curl = ops.adjoint_curl(&ops.curl_n(a)?)?;
    let lap = ops.laplacian(a)?;
    let residual = lap.max_abs_diff(&grad_div.add(&adjoint_curl_curl)?)?;
    Ok(LaplacianSplit { grad_div, adjoint_curl_curl, residual })
}

/// `max |Delta P - (D Div P + (Curl_n P) [[nabla]]_n)|` for an `m x n` field.
pub fn matrix_laplacian_decomposition(ops: &Operators, p: &Field) -> Result<f64> {
    let d_div = ops.jacobian(&ops.matrix_div(p)?)?;
    let curl_term = ops.matrix_adjoint_curl(&ops.matrix_curl(p)?)?;
    ops.laplacian(p)?.max_abs_diff(&d_div.add(&curl_term)?)
}

/// `|int <curl_n a, x> + <a, [[nabla]]^T x> dx|`; zero on the torus.
pub fn integration_by_parts_residual(ops: &Operators, a: &Field, x: &Field) -> Result<f64> {
    let lhs = ops.curl_n(a)?.inner(x)?;
    let rhs = a.inner(&ops.adjoint_curl(x)?)?;
    Ok((lhs + rhs).abs())
}

/// Matrix form `|int <Curl_n P, Q> + <P, Q [[nabla]]_n> dx|` for `P: m x n`, `Q: m x N`.
pub fn matrix_integration_by_parts_residual(ops: &Operators, p: &Field, q: &Field) -> Result<f64> {
    let lhs = ops.matrix_curl(p)?.inner(q)?;
    let rhs = p.inner(&ops.matrix_adjoint_curl(q)?)?;
    Ok((lhs + rhs).abs())
}

/// `max |curl_n [[nabla]]^T curl_n a - Delta curl_n a|`.
pub fn curl_adjoint_curl_identity_residual(ops: &Operators, a: &Field) -> Result<f64> {
    let c = ops.curl_n(a)?;
    let lhs = ops.curl_n(&ops.adjoint_curl(&c)?)?;
    lhs.max_abs_diff(&ops.laplacian(&c)?)
}

/// Sup norms of compositions that vanish identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelResiduals {
    /// `curl_n nabla f`.
    pub curl_grad: f64,
    /// `div [[nabla]]^T x`.
    pub div_adjoint_curl: f64,
    /// `Curl_n D a`.
    pub curl_jacobian: f64,
    /// `inc_n D a`.
    pub inc_jacobian: f64,
    /// `inc_n sym D a`.
    pub inc_sym_jacobian: f64,
}

pub fn kernel_residuals(ops: &Operators, f: &Field, x: &Field, a: &Field) -> Result<KernelResiduals> {
    f.expect_kind(FieldKind::Scalar)?;
    let da = ops.jacobian(a)?;
    Ok(KernelResiduals {
        curl_grad: ops.curl_n(&ops.grad(f)?)?.max_abs(),
        div_adjoint_curl: ops.div(&ops.adjoint_curl(x)?)?.max_abs(),
        curl_jacobian: ops.matrix_curl(&da)?.max_abs(),
        inc_jacobian: ops.inc_n(&da)?.max_abs(),
        inc_sym_jacobian: ops.inc_n(&da.sym()?)?.max_abs(),
    })
}
