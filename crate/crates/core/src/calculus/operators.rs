//! First- and second-order operators built on `[[nabla]]_n`.
//!
//! `curl_n` applies `[[nabla]]_n`: component `(i, j)` is `d_i a_j - d_j a_i`.
//! `adjoint_curl` applies `[[nabla]]_n^T`. Matrix variants act row-wise
//! (`P [[nabla]]^T`, `Q [[nabla]]`) or column-wise (`[[nabla]] Q`,
//! `[[nabla]]^T Q`).

use rayon::prelude::*;

use super::Operators;
use crate::algebra::{cross_dim, offset_pair};
use crate::error::{Error, Result};
use crate::field::{Field, FieldKind};

fn add_into(acc: &mut [f64], x: &[f64], sign: f64) {
    for (a, v) in acc.iter_mut().zip(x) {
        *a += sign * v;
    }
}

impl Operators {
    /// `[[nabla]]_n` on `n` component slices, giving `N` slices.
    fn curl_comps(&self, comps: &[&[f64]]) -> Vec<Vec<f64>> {
        let n = comps.len();
        let mut tasks = Vec::with_capacity(n * (n - 1));
        for j in 1..n {
            for i in 0..j {
                tasks.push((comps[j], i));
                tasks.push((comps[i], j));
            }
        }
        let d = self.d_many(&tasks);
        d.chunks(2)
            .map(|pair| pair[0].iter().zip(&pair[1]).map(|(x, y)| x - y).collect())
            .collect()
    }

    /// `[[nabla]]_n^T` on `N` component slices, giving `n` slices.
    fn adjoint_comps(&self, n: usize, comps: &[&[f64]]) -> Vec<Vec<f64>> {
        let len = self.grid.len();
        let mut tasks = Vec::with_capacity(2 * comps.len());
        for (k, c) in comps.iter().enumerate() {
            let (i, j) = offset_pair(k);
            tasks.push((*c, i));
            tasks.push((*c, j));
        }
        let d = self.d_many(&tasks);
        let mut out = vec![vec![0.0; len]; n];
        for (k, pair) in d.chunks(2).enumerate() {
            let (i, j) = offset_pair(k);
            add_into(&mut out[j], &pair[0], 1.0);
            add_into(&mut out[i], &pair[1], -1.0);
        }
        out
    }

    fn expect_vector(&self, a: &Field) -> Result<()> {
        self.check(a)?;
        a.expect_kind(FieldKind::Vector(self.grid.n()))
    }

    fn matrix_dims(&self, p: &Field) -> Result<(usize, usize)> {
        self.check(p)?;
        match p.kind() {
            FieldKind::Matrix { rows, cols } => Ok((rows, cols)),
            _ => Err(Error::domain(format!("expected a matrix field, got {}", p.describe()))),
        }
    }

    fn expect_cols(&self, p: &Field, cols: usize) -> Result<usize> {
        let (rows, c) = self.matrix_dims(p)?;
        if c != cols {
            return Err(Error::domain(format!(
                "expected {cols} columns, got {}",
                p.describe()
            )));
        }
        Ok(rows)
    }

    fn expect_rows(&self, p: &Field, rows: usize) -> Result<usize> {
        let (r, cols) = self.matrix_dims(p)?;
        if r != rows {
            return Err(Error::domain(format!("expected {rows} rows, got {}", p.describe())));
        }
        Ok(cols)
    }

    /// `nabla f`.
    pub fn grad(&self, f: &Field) -> Result<Field> {
        self.check(f)?;
        f.expect_kind(FieldKind::Scalar)?;
        let n = self.grid.n();
        let tasks: Vec<_> = (0..n).map(|i| (f.data(), i)).collect();
        let comps = self.d_many(&tasks);
        Ok(Field::from_parts(&self.grid, FieldKind::Vector(n), comps.concat()))
    }

    /// `div a = tr(D a)`.
    pub fn div(&self, a: &Field) -> Result<Field> {
        self.expect_vector(a)?;
        let tasks: Vec<_> = (0..self.grid.n()).map(|i| (a.component(i), i)).collect();
        let mut out = vec![0.0; self.grid.len()];
        for d in self.d_many(&tasks) {
            add_into(&mut out, &d, 1.0);
        }
        Ok(Field::from_parts(&self.grid, FieldKind::Scalar, out))
    }

    /// `curl_n a = [[nabla]]_n a`.
    pub fn curl_n(&self, a: &Field) -> Result<Field> {
        self.expect_vector(a)?;
        let comps: Vec<&[f64]> = a.components().collect();
        let out = self.curl_comps(&comps);
        Ok(Field::from_parts(&self.grid, FieldKind::Cross, out.concat()))
    }

    /// `[[nabla]]_n^T a` for a cross field.
    pub fn adjoint_curl(&self, a: &Field) -> Result<Field> {
        self.check(a)?;
        a.expect_kind(FieldKind::Cross)?;
        let n = self.grid.n();
        let comps: Vec<&[f64]> = a.components().collect();
        let out = self.adjoint_comps(n, &comps);
        Ok(Field::from_parts(&self.grid, FieldKind::Vector(n), out.concat()))
    }

    /// `D a`, entry `(r, c) = d_c a_r`, for a vector field of any length.
    pub fn jacobian(&self, a: &Field) -> Result<Field> {
        self.check(a)?;
        let m = match a.kind() {
            FieldKind::Vector(m) => m,
            FieldKind::Cross => a.num_components(),
            _ => return Err(Error::domain(format!("expected a vector field, got {}", a.describe()))),
        };
        let n = self.grid.n();
        let tasks: Vec<_> = (0..m)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| (a.component(r), c))
            .collect();
        let comps = self.d_many(&tasks);
        Ok(Field::from_parts(&self.grid, FieldKind::Matrix { rows: m, cols: n }, comps.concat()))
    }

    /// Hessian `D nabla f`; diagonal entries use the pure second derivative.
    pub fn hessian(&self, f: &Field) -> Result<Field> {
        let g = self.grad(f)?;
        let n = self.grid.n();
        let comps: Vec<Vec<f64>> = (0..n * n)
            .into_par_iter()
            .map(|e| {
                let (i, j) = (e / n, e % n);
                if i == j {
                    self.d2(f.data(), i)
                } else {
                    self.d(g.component(i), j)
                }
            })
            .collect();
        Ok(Field::from_parts(&self.grid, FieldKind::Matrix { rows: n, cols: n }, comps.concat()))
    }

    /// Componentwise `sum_i d_i^2`.
    pub fn laplacian(&self, f: &Field) -> Result<Field> {
        self.check(f)?;
        let n = self.grid.n();
        let comps: Vec<Vec<f64>> = f
            .components()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|c| {
                let mut out = vec![0.0; c.len()];
                for i in 0..n {
                    add_into(&mut out, &self.d2(c, i), 1.0);
                }
                out
            })
            .collect();
        Ok(Field::from_parts(&self.grid, f.kind(), comps.concat()))
    }

    /// Row-wise divergence `P nabla` of an `m x n` matrix field.
    pub fn matrix_div(&self, p: &Field) -> Result<Field> {
        let n = self.grid.n();
        let m = self.expect_cols(p, n)?;
        let tasks: Vec<_> = (0..m)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| (p.entry(r, c), c))
            .collect();
        let d = self.d_many(&tasks);
        let comps: Vec<Vec<f64>> = d
            .chunks(n)
            .map(|row| {
                let mut out = vec![0.0; self.grid.len()];
                row.iter().for_each(|x| add_into(&mut out, x, 1.0));
                out
            })
            .collect();
        Ok(Field::from_parts(&self.grid, FieldKind::Vector(m), comps.concat()))
    }

    /// Row-wise `Curl_n P = P [[nabla]]_n^T`, `m x n` to `m x N`.
    pub fn matrix_curl(&self, p: &Field) -> Result<Field> {
        let n = self.grid.n();
        let m = self.expect_cols(p, n)?;
        let big = cross_dim(n)?;
        let mut comps = Vec::with_capacity(m * big);
        for r in 0..m {
            let row: Vec<&[f64]> = (0..n).map(|c| p.entry(r, c)).collect();
            comps.extend(self.curl_comps(&row));
        }
        Ok(Field::from_parts(&self.grid, FieldKind::Matrix { rows: m, cols: big }, comps.concat()))
    }

    /// Row-wise `Q [[nabla]]_n`, `m x N` to `m x n`.
    pub fn matrix_adjoint_curl(&self, q: &Field) -> Result<Field> {
        let n = self.grid.n();
        let m = self.expect_cols(q, cross_dim(n)?)?;
        let mut comps = Vec::with_capacity(m * n);
        for r in 0..m {
            let row: Vec<&[f64]> = (0..q.dims().1).map(|c| q.entry(r, c)).collect();
            comps.extend(self.adjoint_comps(n, &row));
        }
        Ok(Field::from_parts(&self.grid, FieldKind::Matrix { rows: m, cols: n }, comps.concat()))
    }

    /// Column-wise `[[nabla]]_n Q`, `n x m` to `N x m`.
    pub fn column_curl(&self, q: &Field) -> Result<Field> {
        let n = self.grid.n();
        let m = self.expect_rows(q, n)?;
        let big = cross_dim(n)?;
        let cols: Vec<Vec<Vec<f64>>> = (0..m)
            .map(|c| {
                let col: Vec<&[f64]> = (0..n).map(|r| q.entry(r, c)).collect();
                self.curl_comps(&col)
            })
            .collect();
        let mut data = Vec::with_capacity(big * m * self.grid.len());
        for k in 0..big {
            for col in &cols {
                data.extend_from_slice(&col[k]);
            }
        }
        Ok(Field::from_parts(&self.grid, FieldKind::Matrix { rows: big, cols: m }, data))
    }

    /// Column-wise `[[nabla]]_n^T Q`, `N x m` to `n x m`.
    pub fn column_adjoint_curl(&self, q: &Field) -> Result<Field> {
        let n = self.grid.n();
        let big = cross_dim(n)?;
        let m = self.expect_rows(q, big)?;
        let cols: Vec<Vec<Vec<f64>>> = (0..m)
            .map(|c| {
                let col: Vec<&[f64]> = (0..big).map(|r| q.entry(r, c)).collect();
                self.adjoint_comps(n, &col)
            })
            .collect();
        let mut data = Vec::with_capacity(n * m * self.grid.len());
        for r in 0..n {
            for col in &cols {
                data.extend_from_slice(&col[r]);
            }
        }
        Ok(Field::from_parts(&self.grid, FieldKind::Matrix { rows: n, cols: m }, data))
    }

    /// `inc_n P = -[[nabla]]_n P [[nabla]]_n^T`, `n x n` to `N x N`.
    pub fn inc_n(&self, p: &Field) -> Result<Field> {
        let n = self.grid.n();
        self.expect_rows(p, n)?;
        Ok(self.column_curl(&self.matrix_curl(p)?)?.neg())
    }

    /// `[[nabla]]_n^T Q [[nabla]]_n`, `N x N` to `n x n`.
    pub fn adjoint_sandwich(&self, q: &Field) -> Result<Field> {
        let big = cross_dim(self.grid.n())?;
        self.expect_rows(q, big)?;
        self.column_adjoint_curl(&self.matrix_adjoint_curl(q)?)
    }

    /// `[[nabla]]_n^T (zeta Id_N) [[nabla]]_n`, equal to `Delta zeta Id_n - D nabla zeta`.
    pub fn inc_sandwich_scalar(&self, zeta: &Field) -> Result<Field> {
        self.check(zeta)?;
        let big = cross_dim(self.grid.n())?;
        self.adjoint_sandwich(&Field::scalar_identity(zeta, big)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::Backend;
    use crate::field::BandLimited;
    use crate::grid::Grid;

    fn ops(n: usize, m: usize) -> Operators {
        Operators::spectral(&Grid::uniform(n, m).unwrap()).unwrap()
    }

    fn random(ops: &Operators, kind: FieldKind, stream: u64) -> Field {
        Field::random_band_limited(ops.grid(), kind, &BandLimited::new(11).stream(stream)).unwrap()
    }

    fn analytic(g: &Grid, kind: FieldKind, f: impl Fn(&[f64], &mut [f64])) -> Field {
        Field::sample(g, kind, f).unwrap()
    }

    #[test]
    fn grad_of_sine() {
        let o = ops(2, 32);
        let f = Field::sample_scalar(o.grid(), |x| x[0].sin()).unwrap();
        let expected = analytic(o.grid(), FieldKind::Vector(2), |x, out| {
            out.copy_from_slice(&[x[0].cos(), 0.0])
        });
        assert!(o.grad(&f).unwrap().max_abs_diff(&expected).unwrap() < 1e-12);
        let c = Field::sample_scalar(o.grid(), |_| 3.5).unwrap();
        assert!(o.grad(&c).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn div_and_curl_examples() {
        let o = ops(2, 32);
        let g = o.grid().clone();
        let a = analytic(&g, FieldKind::Vector(2), |x, out| out.copy_from_slice(&[x[0].sin(), 0.0]));
        let cos1 = Field::sample_scalar(&g, |x| x[0].cos()).unwrap();
        assert!(o.div(&a).unwrap().max_abs_diff(&cos1).unwrap() < 1e-12);
        let b = analytic(&g, FieldKind::Vector(2), |x, out| out.copy_from_slice(&[x[1].sin(), 0.0]));
        assert!(o.div(&b).unwrap().max_abs() < 1e-12);
        let c = analytic(&g, FieldKind::Vector(2), |x, out| out.copy_from_slice(&[-x[1].sin(), 0.0]));
        let cos2 = Field::sample_scalar(&g, |x| x[1].cos()).unwrap();
        let curl = o.curl_n(&c).unwrap().reshape(FieldKind::Scalar).unwrap();
        assert!(curl.max_abs_diff(&cos2).unwrap() < 1e-12);
    }

    #[test]
    fn curl_three_dimensional_pattern() {
        let o = ops(3, 16);
        let a = random(&o, FieldKind::Vector(3), 1);
        let c = o.curl_n(&a).unwrap();
        let d = |comp: usize, axis: usize| o.d(a.component(comp), axis);
        let sub = |x: Vec<f64>, y: Vec<f64>| x.iter().zip(&y).map(|(p, q)| p - q).collect::<Vec<_>>();
        let expected = [sub(d(1, 0), d(0, 1)), sub(d(2, 0), d(0, 2)), sub(d(2, 1), d(1, 2))];
        for (k, e) in expected.iter().enumerate() {
            assert_eq!(c.component(k), e.as_slice());
        }
        let ja = o.jacobian(&a).unwrap();
        let two_skew = ja.skew().unwrap().scale(2.0);
        for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            for (x, y) in c.component(k).iter().zip(two_skew.entry(j, i)) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_three_dimensional_formula() {
        let o = ops(3, 16);
        let a = random(&o, FieldKind::Cross, 2);
        let out = o.adjoint_curl(&a).unwrap();
        let d = |comp: usize, axis: usize| o.d(a.component(comp), axis);
        let comb = |x: Vec<f64>, sx: f64, y: Vec<f64>, sy: f64| {
            x.iter().zip(&y).map(|(p, q)| sx * p + sy * q).collect::<Vec<_>>()
        };
        let expected = [
            comb(d(0, 1), -1.0, d(1, 2), -1.0),
            comb(d(0, 0), 1.0, d(2, 2), -1.0),
            comb(d(1, 0), 1.0, d(2, 1), 1.0),
        ];
        for (c, e) in expected.iter().enumerate() {
            for (x, y) in out.component(c).iter().zip(e) {
                assert!((x - y).abs() < 1e-13);
            }
        }
        let constant = Field::new(o.grid(), FieldKind::Cross, vec![0.7; 3 * o.grid().len()]).unwrap();
        assert!(o.adjoint_curl(&constant).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn matrix_div_rows_and_laplacian() {
        let o = ops(3, 8);
        let p = random(&o, FieldKind::Matrix { rows: 2, cols: 3 }, 3);
        let dp = o.matrix_div(&p).unwrap();
        for r in 0..2 {
            assert_eq!(dp.component(r), o.div(&p.row(r)).unwrap().data());
        }
        let a = random(&o, FieldKind::Vector(3), 4);
        let lap = o.matrix_div(&o.jacobian(&a).unwrap()).unwrap();
        assert!(lap.max_abs_diff(&o.laplacian(&a).unwrap()).unwrap() < 1e-11);
    }

    #[test]
    fn row_and_column_variants_agree_with_transposes() {
        let o = ops(3, 8);
        let q = random(&o, FieldKind::Matrix { rows: 3, cols: 2 }, 5);
        let lhs = o.column_curl(&q).unwrap();
        let rhs = o.matrix_curl(&q.transpose()).unwrap().transpose();
        assert_eq!(lhs, rhs);
        let q = random(&o, FieldKind::Matrix { rows: 3, cols: 4 }, 6);
        let lhs = o.column_adjoint_curl(&q).unwrap();
        let rhs = o.matrix_adjoint_curl(&q.transpose()).unwrap().transpose();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn inc_sandwich_scalar_example() {
        let o = ops(2, 16);
        let zeta = Field::sample_scalar(o.grid(), |x| x[0].sin()).unwrap();
        let out = o.inc_sandwich_scalar(&zeta).unwrap();
        let expected = analytic(o.grid(), FieldKind::Matrix { rows: 2, cols: 2 }, |x, e| {
            e.copy_from_slice(&[0.0, 0.0, 0.0, -x[0].sin()])
        });
        assert!(out.max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn shape_errors() {
        let o = ops(3, 8);
        let s = random(&o, FieldKind::Scalar, 7);
        assert!(o.div(&s).is_err());
        assert!(o.curl_n(&s).is_err());
        assert!(o.adjoint_curl(&s).is_err());
        assert!(o.matrix_curl(&random(&o, FieldKind::Matrix { rows: 3, cols: 2 }, 8)).is_err());
        assert!(o.inc_n(&random(&o, FieldKind::Matrix { rows: 2, cols: 3 }, 8)).is_err());
        let other = ops(3, 4);
        let f = random(&other, FieldKind::Scalar, 1);
        assert!(matches!(o.grad(&f), Err(Error::Config(_))));
        let c2 = Operators::new(o.grid(), Backend::Central2).unwrap();
        assert!(c2.grad(&s).is_ok());
    }
}
