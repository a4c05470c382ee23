//! Full-space Helmholtz split by direct quadrature of the Riesz potentials
//!
//! `a_curlfree(x) = 1/(n omega_n) int (x - y) |x - y|^-n div a(y) dy`,
//! `a_divfree(x)  = 1/(n omega_n) int [[x - y]]^T |x - y|^-n curl_n a(y) dy`,
//!
//! evaluated by the midpoint rule on the sample grid with the cell `y = x`
//! left out. The box is treated as a window of `R^n`, not as a torus.

use rayon::prelude::*;

use super::green::GreenKernel;
use super::{HelmholtzResult, Method};
use crate::algebra::offset_pair;
use crate::calculus::Operators;
use crate::error::{Error, Result};
use crate::field::{Field, FieldKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszOptions {
    /// Largest allowed `max |a|` in the margin band, relative to `max |a|`.
    pub support_tol: f64,
    /// Width of the margin band at each face, as a fraction of the box side.
    pub margin: f64,
}

impl Default for RieszOptions {
    fn default() -> Self {
        Self { support_tol: 1e-2, margin: 0.25 }
    }
}

fn check_support(a: &Field, opts: &RieszOptions) -> Result<()> {
    let g = a.grid();
    let peak = a.max_abs();
    let mut idx = vec![0; g.n()];
    let mut edge = 0.0f64;
    for p in 0..g.len() {
        g.multi_index(p, &mut idx);
        let in_band = idx.iter().zip(g.shape()).any(|(&i, &m)| {
            let t = i as f64 / m as f64;
            t < opts.margin || t > 1.0 - opts.margin
        });
        if in_band {
            for c in a.components() {
                edge = edge.max(c[p].abs());
            }
        }
    }
    if edge > opts.support_tol * peak {
        return Err(Error::precondition(format!(
            "field is not compactly supported: max |a| = {edge:.3e} in the {:.0}% margin band exceeds {:.1e} x {peak:.3e}",
            100.0 * opts.margin,
            opts.support_tol
        )));
    }
    Ok(())
}

pub fn riesz_decompose(ops: &Operators, a: &Field, opts: &RieszOptions) -> Result<HelmholtzResult> {
    ops.check(a)?;
    let g = ops.grid();
    let n = g.n();
    if !(2..=3).contains(&n) {
        return Err(Error::config(format!("Riesz quadrature is configured for n in {{2, 3}}, got {n}")));
    }
    a.expect_kind(FieldKind::Vector(n))?;
    check_support(a, opts)?;

    let div = ops.div(a)?;
    let curl = ops.curl_n(a)?;
    let kernel = GreenKernel::new(n)?;
    let weight = kernel.gradient_constant() * g.cell_volume();
    let len = g.len();
    let big = n * (n - 1) / 2;
    let pairs: Vec<(usize, usize)> = (0..big).map(offset_pair).collect();

    // Kernel `(x - y) |x - y|^-n` tabulated on index offsets.
    let shape = g.shape();
    let tdims: Vec<usize> = shape.iter().map(|m| 2 * m - 1).collect();
    let tlen: usize = tdims.iter().product();
    let mut table = vec![0.0; n * tlen];
    let mut off = vec![0.0; n];
    for t in 0..tlen {
        let mut rest = t;
        let mut r2 = 0.0;
        for (a, (&d, &m)) in tdims.iter().zip(shape).enumerate().rev() {
            off[a] = (rest % d) as f64 - (m - 1) as f64;
            off[a] *= g.spacing(a);
            r2 += off[a] * off[a];
            rest /= d;
        }
        if r2 > 0.0 {
            let w = r2.sqrt().powi(n as i32).recip();
            for a in 0..n {
                table[t * n + a] = off[a] * w;
            }
        }
    }
    let mut tstride = vec![1; n];
    for a in (0..n - 1).rev() {
        tstride[a] = tstride[a + 1] * tdims[a + 1];
    }
    let index: Vec<usize> = (0..len)
        .map(|p| {
            let mut idx = vec![0; n];
            g.multi_index(p, &mut idx);
            idx.iter().zip(&tstride).map(|(i, s)| i * s).sum()
        })
        .collect();
    let centre: usize = shape.iter().zip(&tstride).map(|(m, s)| (m - 1) * s).sum();
    let div_y = div.data();
    let curl_y: Vec<f64> = (0..len * big).map(|t| curl.component(t % big)[t / big]).collect();

    let results: Vec<(Vec<f64>, Vec<f64>)> = (0..len)
        .into_par_iter()
        .map(|p| {
            let mut cf = vec![0.0; n];
            let mut df = vec![0.0; n];
            let base = index[p] + centre;
            for q in 0..len {
                let r = &table[(base - index[q]) * n..][..n];
                let dv = div_y[q];
                for i in 0..n {
                    cf[i] += r[i] * dv;
                }
                for (s, &(i, j)) in pairs.iter().enumerate() {
                    let v = curl_y[q * big + s];
                    df[j] += r[i] * v;
                    df[i] -= r[j] * v;
                }
            }
            cf.iter_mut().chain(df.iter_mut()).for_each(|v| *v *= weight);
            (cf, df)
        })
        .collect();

    let mut cf = vec![0.0; n * len];
    let mut df = vec![0.0; n * len];
    for (p, (c, d)) in results.into_iter().enumerate() {
        for i in 0..n {
            cf[i * len + p] = c[i];
            df[i * len + p] = d[i];
        }
    }
    let a_curlfree = Field::new(g, FieldKind::Vector(n), cf)?;
    let a_divfree = Field::new(g, FieldKind::Vector(n), df)?;
    HelmholtzResult::assemble(ops, Method::Riesz, a, a_curlfree, a_divfree, vec![0.0; n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BandLimited;
    use crate::grid::Grid;
    use crate::helmholtz::{bump_divfree, bump_gradient, relative_l2};

    fn ops(n: usize, m: usize) -> Operators {
        Operators::spectral(&Grid::uniform(n, m).unwrap()).unwrap()
    }

    #[test]
    fn zero_field_gives_zero_parts() {
        let o = ops(2, 16);
        let a = Field::zeros(o.grid(), FieldKind::Vector(2));
        let r = riesz_decompose(&o, &a, &RieszOptions::default()).unwrap();
        assert_eq!(r.a_curlfree.max_abs(), 0.0);
        assert_eq!(r.a_divfree.max_abs(), 0.0);
    }

    #[test]
    fn bump_fields_are_recovered() {
        let o = ops(2, 32);
        let grad = bump_gradient(&o, 0.4).unwrap();
        let r = riesz_decompose(&o, &grad, &RieszOptions::default()).unwrap();
        assert!(relative_l2(&r.a_curlfree, &grad).unwrap() < 5e-2);
        assert!(r.a_divfree.l2_norm() < 5e-2 * grad.l2_norm());
        let rot = bump_divfree(&o, 0.4).unwrap();
        let r = riesz_decompose(&o, &rot, &RieszOptions::default()).unwrap();
        assert!(relative_l2(&r.a_divfree, &rot).unwrap() < 5e-2);
    }

    #[test]
    fn three_dimensional_bump() {
        let o = ops(3, 24);
        let grad = bump_gradient(&o, 0.45).unwrap();
        let r = riesz_decompose(&o, &grad, &RieszOptions::default()).unwrap();
        assert!(relative_l2(&r.a_curlfree, &grad).unwrap() < 1e-1);
    }

    #[test]
    fn preconditions() {
        let o = ops(2, 16);
        let a = Field::random_band_limited(o.grid(), FieldKind::Vector(2), &BandLimited::new(1)).unwrap();
        assert!(matches!(riesz_decompose(&o, &a, &RieszOptions::default()), Err(Error::Precondition(_))));
        let o4 = ops(4, 4);
        let a = Field::zeros(o4.grid(), FieldKind::Vector(4));
        assert!(matches!(riesz_decompose(&o4, &a, &RieszOptions::default()), Err(Error::Config(_))));
    }
}
