//! Fourier projectors `k k^T / |k|^2` and `[[k]]^T [[k]] / |k|^2`.

use num_complex::Complex64;
use nalgebra::DMatrix;

use super::{HelmholtzResult, Method};
use crate::algebra::{cross_matrix_raw, offset_pair};
use crate::calculus::Operators;
use crate::error::{Error, Result};
use crate::field::{Field, FieldKind};

/// `max |(k k^T + [[k]]^T [[k]]) / |k|^2 - Id|` for one wavevector.
pub fn projector_completeness(k: &[f64]) -> Result<f64> {
    let n = k.len();
    let norm2: f64 = k.iter().map(|x| x * x).sum();
    if n < 2 || norm2 == 0.0 {
        return Err(Error::domain("projectors need n >= 2 and k != 0"));
    }
    let kk = DMatrix::from_fn(n, n, |i, j| k[i] * k[j]);
    let c = cross_matrix_raw(k);
    let sum = (kk + c.transpose() * c) / norm2;
    Ok((sum - DMatrix::identity(n, n)).amax())
}

/// Splits `a` on the torus with the Fourier projectors.
///
/// Projectors use the odd-derivative wavevector (Nyquist components zeroed),
/// so `div` and `curl_n` of the parts vanish under the spectral derivative.
/// Modes whose wavevector is entirely Nyquist use the signed wavevector.
pub fn spectral_decompose(ops: &Operators, a: &Field) -> Result<HelmholtzResult> {
    let plan = ops.require_plan()?;
    ops.check(a)?;
    let n = ops.grid().n();
    a.expect_kind(FieldKind::Vector(n))?;
    let len = ops.grid().len();
    let spec: Vec<Vec<Complex64>> = a.components().map(|c| plan.forward(c)).collect();
    let mut cf = vec![vec![Complex64::default(); len]; n];
    let mut df = vec![vec![Complex64::default(); len]; n];
    let big = n * (n - 1) / 2;
    let mut k = vec![0.0; n];
    let mut signed = vec![0i64; n];
    let mut w = vec![Complex64::default(); big];
    let mut ahat = vec![Complex64::default(); n];
    for p in 1..len {
        plan.wavevector_odd(p, &mut k);
        if k.iter().all(|x| *x == 0.0) {
            plan.wavevector(p, &mut signed);
            k.iter_mut().zip(&signed).for_each(|(x, s)| *x = *s as f64);
        }
        let norm2: f64 = k.iter().map(|x| x * x).sum();
        for c in 0..n {
            ahat[c] = spec[c][p];
        }
        let kdot: Complex64 = k.iter().zip(&ahat).map(|(ki, ai)| ai * *ki).sum();
        for c in 0..n {
            cf[c][p] = kdot * (k[c] / norm2);
        }
        for (s, ws) in w.iter_mut().enumerate() {
            let (i, j) = offset_pair(s);
            *ws = ahat[j] * k[i] - ahat[i] * k[j];
        }
        for (s, ws) in w.iter().enumerate() {
            let (i, j) = offset_pair(s);
            df[j][p] += ws * (k[i] / norm2);
            df[i][p] -= ws * (k[j] / norm2);
        }
    }
    let mean_mode: Vec<f64> = spec.iter().map(|s| s[0].re / len as f64).collect();
    let to_field = |parts: Vec<Vec<Complex64>>| {
        let data: Vec<f64> = parts.into_iter().flat_map(|s| plan.inverse_real(s)).collect();
        Field::new(ops.grid(), FieldKind::Vector(n), data)
    };
    let a_curlfree = to_field(cf)?;
    let a_divfree = to_field(df)?;
    HelmholtzResult::assemble(ops, Method::Spectral, a, a_curlfree, a_divfree, mean_mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BandLimited;
    use crate::grid::Grid;

    fn ops(n: usize, m: usize) -> Operators {
        Operators::spectral(&Grid::uniform(n, m).unwrap()).unwrap()
    }

    #[test]
    fn projectors_sum_to_identity() {
        for k in [vec![1.0, 0.0], vec![3.0, -2.0, 5.0], vec![1.0, 2.0, -3.0, 4.0, 0.5]] {
            assert!(projector_completeness(&k).unwrap() <= 1e-15);
        }
        assert!(projector_completeness(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn gradient_is_curl_free() {
        let o = ops(2, 16);
        let f = Field::sample_scalar(o.grid(), |x| x[0].sin() * x[1].sin()).unwrap();
        let a = o.grad(&f).unwrap();
        let r = spectral_decompose(&o, &a).unwrap();
        assert!(r.a_curlfree.max_abs_diff(&a).unwrap() <= 1e-12);
        assert!(r.a_divfree.max_abs() <= 1e-12);
    }

    #[test]
    fn shear_is_divergence_free() {
        let o = ops(2, 16);
        let a = Field::sample(o.grid(), FieldKind::Vector(2), |x, out| out.copy_from_slice(&[x[1].sin(), 0.0])).unwrap();
        let r = spectral_decompose(&o, &a).unwrap();
        assert!(r.a_divfree.max_abs_diff(&a).unwrap() <= 1e-12);
        assert!(r.a_curlfree.max_abs() <= 1e-12);
    }

    #[test]
    fn random_field_in_four_dimensions() {
        let o = ops(4, 8);
        let a = Field::random_band_limited(o.grid(), FieldKind::Vector(4), &BandLimited::new(3)).unwrap();
        let r = spectral_decompose(&o, &a).unwrap();
        let d = r.diagnostics;
        assert!(d.sum_residual <= 1e-12 && d.div_divfree <= 1e-11 && d.curl_curlfree <= 1e-11, "{d:?}");
        let again = spectral_decompose(&o, &r.a_divfree).unwrap();
        assert!(again.a_divfree.max_abs_diff(&r.a_divfree).unwrap() <= 1e-12);
        assert!(r.a_curlfree.inner(&r.a_divfree).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn mean_is_reported_separately() {
        let o = ops(2, 8);
        let a = Field::sample(o.grid(), FieldKind::Vector(2), |x, out| out.copy_from_slice(&[2.0 + x[0].cos(), -1.0])).unwrap();
        let r = spectral_decompose(&o, &a).unwrap();
        assert!((r.mean_mode[0] - 2.0).abs() < 1e-14 && (r.mean_mode[1] + 1.0).abs() < 1e-14);
        assert!(r.diagnostics.sum_residual < 1e-14);
        assert!(r.a_curlfree.means().iter().all(|m| m.abs() < 1e-15));
    }

    #[test]
    fn nyquist_content_is_still_split_exactly() {
        let o = ops(2, 8);
        let a = Field::sample(o.grid(), FieldKind::Vector(2), |x, out| {
            out.copy_from_slice(&[(4.0 * x[0]).cos() * x[1].sin(), (4.0 * x[1]).cos()])
        })
        .unwrap();
        let d = spectral_decompose(&o, &a).unwrap().diagnostics;
        assert!(d.sum_residual < 1e-13 && d.div_divfree < 1e-12 && d.curl_curlfree < 1e-12, "{d:?}");
    }
}
