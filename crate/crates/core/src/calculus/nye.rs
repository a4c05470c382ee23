//! The three-dimensional Nye formulas and a mode-wise linear-determinacy
//! test of `D a_n(A)` from `Curl_n A` for skew fields `A` in any dimension.
//!
//! The 3D formulas use the classical row-wise `Curl` built on `curl v = nabla x v`:
//! `Curl(Anti a) = div a Id - (D a)^T` and `D a = tr(C)/2 Id - C^T` for
//! `C = Curl(Anti a)`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::Operators;
use crate::algebra::{cross_dim, offset_pair};
use crate::error::{Error, Result};
use crate::field::{BandLimited, Field, FieldKind};

fn expect_three(ops: &Operators) -> Result<()> {
    if ops.grid().n() != 3 {
        return Err(Error::domain(format!(
            "Nye formulas are three-dimensional, grid has n = {}",
            ops.grid().n()
        )));
    }
    Ok(())
}

fn comb(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(p, q)| p - q).collect()
}

fn curl3_comps(ops: &Operators, c: [&[f64]; 3]) -> [Vec<f64>; 3] {
    let d = ops.d_many(&[(c[2], 1), (c[1], 2), (c[0], 2), (c[2], 0), (c[1], 0), (c[0], 1)]);
    [comb(&d[0], &d[1]), comb(&d[2], &d[3]), comb(&d[4], &d[5])]
}

/// Classical `nabla x a` for a 3D vector field.
pub fn curl3(ops: &Operators, a: &Field) -> Result<Field> {
    expect_three(ops)?;
    ops.check(a)?;
    a.expect_kind(FieldKind::Vector(3))?;
    let out = curl3_comps(ops, [a.component(0), a.component(1), a.component(2)]);
    Ok(Field::from_parts(ops.grid(), FieldKind::Vector(3), out.concat()))
}

/// Row-wise classical curl of an `m x 3` matrix field.
pub fn matrix_curl3(ops: &Operators, p: &Field) -> Result<Field> {
    expect_three(ops)?;
    ops.check(p)?;
    let (m, cols) = p.dims();
    if !matches!(p.kind(), FieldKind::Matrix { .. }) || cols != 3 {
        return Err(Error::domain(format!("expected an m x 3 matrix field, got {}", p.describe())));
    }
    let rows: Vec<Vec<f64>> = (0..m)
        .flat_map(|r| curl3_comps(ops, [p.entry(r, 0), p.entry(r, 1), p.entry(r, 2)]))
        .collect();
    Ok(Field::from_parts(ops.grid(), FieldKind::Matrix { rows: m, cols: 3 }, rows.concat()))
}

/// `Anti(a)` with `Anti(a) v = a x v`.
pub fn anti(a: &Field) -> Result<Field> {
    if a.n() != 3 {
        return Err(Error::domain("Anti is defined for n = 3"));
    }
    a.expect_kind(FieldKind::Vector(3))?;
    let len = a.grid().len();
    let zero = vec![0.0; len];
    let neg = |c: usize| a.component(c).iter().map(|x| -x).collect::<Vec<f64>>();
    let comps = [
        zero.clone(),
        neg(2),
        a.component(1).to_vec(),
        a.component(2).to_vec(),
        zero.clone(),
        neg(0),
        neg(1),
        a.component(0).to_vec(),
        zero,
    ];
    Ok(Field::from_parts(a.grid(), FieldKind::Matrix { rows: 3, cols: 3 }, comps.concat()))
}

/// `Curl(Anti a)`.
pub fn nye_curl_of_skew_3d(ops: &Operators, a: &Field) -> Result<Field> {
    ops.check(a)?;
    matrix_curl3(ops, &anti(a)?)
}

/// `tr(C)/2 Id - C^T`, which returns `D a` for `C = Curl(Anti a)`.
pub fn nye_recover_gradient_3d(c: &Field) -> Result<Field> {
    if c.n() != 3 || c.dims() != (3, 3) {
        return Err(Error::domain(format!("expected a 3 x 3 field in 3D, got {}", c.describe())));
    }
    let half_trace = c.trace()?.scale(0.5);
    Field::scalar_identity(&half_trace, 3)?.sub(&c.transpose())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NyeReport {
    /// `max |Curl(Anti a) - (div a Id - (D a)^T)|`.
    pub curl_identity_residual: f64,
    /// `max |recover(Curl(Anti a)) - D a|`.
    pub roundtrip_residual: f64,
    /// `max |Curl_3 A - Curl(A) Q^T|` with `Q (c1, c2, c3) = (c3, -c2, c1)`,
    /// linking the generalized and classical row-wise curls.
    pub generalized_link_residual: f64,
}

pub fn nye_check(ops: &Operators, a: &Field) -> Result<NyeReport> {
    let c = nye_curl_of_skew_3d(ops, a)?;
    let da = ops.jacobian(a)?;
    let div_id = Field::scalar_identity(&ops.div(a)?, 3)?;
    let curl_identity_residual = c.max_abs_diff(&div_id.sub(&da.transpose())?)?;
    let roundtrip_residual = nye_recover_gradient_3d(&c)?.max_abs_diff(&da)?;
    let generalized = ops.matrix_curl(&anti(a)?)?;
    let mut permuted = Vec::with_capacity(9);
    for r in 0..3 {
        permuted.push(c.entry(r, 2).to_vec());
        permuted.push(c.entry(r, 1).iter().map(|x| -x).collect());
        permuted.push(c.entry(r, 0).to_vec());
    }
    let permuted = Field::from_parts(ops.grid(), FieldKind::Matrix { rows: 3, cols: 3 }, permuted.concat());
    let generalized_link_residual = generalized.max_abs_diff(&permuted)?;
    Ok(NyeReport { curl_identity_residual, roundtrip_residual, generalized_link_residual })
}

/// Real form `[[Re, -Im], [Im, Re]]` of a complex matrix.
fn realify(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// `M^+ M`, the orthogonal projector onto the row space of `M`, from the
/// eigenvectors of `M^T M` with eigenvalues above a relative threshold.
fn row_space_projector(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.transpose() * m);
    let top = eig.eigenvalues.amax();
    let c = m.ncols();
    let mut p = DMatrix::zeros(c, c);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > 1e-20 * top {
            let v = eig.eigenvectors.column(i);
            p += v * v.transpose();
        }
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterminacyReport {
    pub n: usize,
    /// Nonzero Fourier modes tested.
    pub modes: usize,
    /// Worst `|M_D - M_D M_curl^+ M_curl|_F / |M_D|_F` over the modes.
    pub max_residual: f64,
}

/// Checks mode by mode that `D a_n(A)` is a linear function of `Curl_n A`.
///
/// For each basis skew field `A_s = A_n(e_s) f`, with `f` a band-limited
/// scalar, the discrete `Curl_n A_s` and `D (e_s f)` are transformed. Their
/// coefficients at mode `k` form the columns of `M_curl(k)` and `M_D(k)`; a
/// linear map exists on that mode iff `M_D` vanishes on the kernel of `M_curl`.
pub fn linear_determinacy(ops: &Operators, band: usize, seed: u64) -> Result<DeterminacyReport> {
    let plan = ops.require_plan()?;
    let grid = ops.grid();
    let n = grid.n();
    let big = cross_dim(n)?;
    let len = grid.len();
    let f = Field::random_band_limited(grid, FieldKind::Scalar, &BandLimited::new(seed).band(band, n).zero_mean())?;

    let mut curl_spec = Vec::with_capacity(big);
    let mut d_spec = Vec::with_capacity(big);
    for s in 0..big {
        let (i, j) = offset_pair(s);
        let mut a = Field::zeros(grid, FieldKind::Matrix { rows: n, cols: n });
        a.component_mut(i * n + j).copy_from_slice(f.data());
        a.component_mut(j * n + i).iter_mut().zip(f.data()).for_each(|(x, v)| *x = -v);
        let curl = ops.matrix_curl(&a)?;
        let mut e = Field::zeros(grid, FieldKind::Vector(big));
        e.component_mut(s).copy_from_slice(f.data());
        let d = ops.jacobian(&e)?;
        curl_spec.push(curl.components().map(|c| plan.forward(c)).collect::<Vec<_>>());
        d_spec.push(d.components().map(|c| plan.forward(c)).collect::<Vec<_>>());
    }

    let f_spec = plan.forward(f.data());
    let peak = f_spec.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let mut modes = 0;
    let mut max_residual = 0.0f64;
    for p in 0..len {
        if p == 0 || f_spec[p].norm() <= 1e-8 * peak {
            continue;
        }
        modes += 1;
        let m_curl = realify(&DMatrix::from_fn(n * big, big, |row, s| curl_spec[s][row][p]));
        let m_d = realify(&DMatrix::from_fn(big * n, big, |row, s| d_spec[s][row][p]));
        let projector = row_space_projector(&m_curl);
        let residual = (&m_d - &m_d * projector).norm() / m_d.norm();
        max_residual = max_residual.max(residual);
    }
    Ok(DeterminacyReport { n, modes, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn ops3(m: usize) -> Operators {
        Operators::spectral(&Grid::uniform(3, m).unwrap()).unwrap()
    }

    #[test]
    fn anti_acts_as_cross_product() {
        let g = Grid::uniform(3, 4).unwrap();
        let a = Field::sample(&g, FieldKind::Vector(3), |_, o| o.copy_from_slice(&[1.0, 2.0, 3.0])).unwrap();
        let m = anti(&a).unwrap();
        let at = |r: usize, c: usize| m.entry(r, c)[0];
        let v = [4.0, 5.0, 6.0];
        let mv: Vec<f64> = (0..3).map(|r| (0..3).map(|c| at(r, c) * v[c]).sum()).collect();
        assert_eq!(mv, vec![2.0 * 6.0 - 3.0 * 5.0, 3.0 * 4.0 - 1.0 * 6.0, 1.0 * 5.0 - 2.0 * 4.0]);
    }

    #[test]
    fn single_shear_example() {
        let o = ops3(8);
        let a = Field::sample(o.grid(), FieldKind::Vector(3), |x, out| out.copy_from_slice(&[x[1].sin(), 0.0, 0.0])).unwrap();
        let c = nye_curl_of_skew_3d(&o, &a).unwrap();
        let minus_da_t = o.jacobian(&a).unwrap().transpose().neg();
        assert!(c.max_abs_diff(&minus_da_t).unwrap() < 1e-12);
        let constant = Field::new(o.grid(), FieldKind::Vector(3), vec![2.0; 3 * o.grid().len()]).unwrap();
        assert!(nye_curl_of_skew_3d(&o, &constant).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn round_trip_on_random_field() {
        let o = ops3(16);
        let a = Field::random_band_limited(o.grid(), FieldKind::Vector(3), &BandLimited::new(4)).unwrap();
        let r = nye_check(&o, &a).unwrap();
        assert!(r.curl_identity_residual < 1e-10, "{r:?}");
        assert!(r.roundtrip_residual < 1e-10, "{r:?}");
        assert!(r.generalized_link_residual < 1e-12, "{r:?}");
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let o = Operators::spectral(&Grid::uniform(2, 8).unwrap()).unwrap();
        let a = Field::zeros(o.grid(), FieldKind::Vector(2));
        assert!(nye_curl_of_skew_3d(&o, &a).is_err());
        assert!(curl3(&o, &a).is_err());
    }

    #[test]
    fn determinacy_in_three_and_four_dimensions() {
        let r = linear_determinacy(&ops3(8), 2, 1).unwrap();
        assert!(r.modes > 50 && r.max_residual < 1e-8, "{r:?}");
        let o4 = Operators::spectral(&Grid::uniform(4, 8).unwrap()).unwrap();
        let r = linear_determinacy(&o4, 1, 1).unwrap();
        assert!(r.modes == 80 && r.max_residual < 1e-8, "{r:?}");
    }
}
