//! Sampled fields on a periodic [`Grid`].
//!
//! Data is component-major: component `c` occupies
//! `data[c * len .. (c + 1) * len]`, each block row-major over the grid.
//! Matrix entry `(r, c)` is component `r * cols + c`.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::random::{normal, rng};
use crate::spectral::SpectralPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    /// Vector with the given number of components.
    Vector(usize),
    /// `n(n-1)/2` components, in pair order.
    Cross,
    Matrix { rows: usize, cols: usize },
}

impl FieldKind {
    pub fn components(&self, n: usize) -> usize {
        match *self {
            FieldKind::Scalar => 1,
            FieldKind::Vector(m) => m,
            FieldKind::Cross => n * (n - 1) / 2,
            FieldKind::Matrix { rows, cols } => rows * cols,
        }
    }

    /// `(rows, cols)` when the components are viewed as a matrix.
    pub fn dims(&self, n: usize) -> (usize, usize) {
        match *self {
            FieldKind::Matrix { rows, cols } => (rows, cols),
            other => (other.components(n), 1),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FieldKind::Scalar => "scalar",
            FieldKind::Vector(_) => "vector",
            FieldKind::Cross => "cross",
            FieldKind::Matrix { .. } => "matrix",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    kind: FieldKind,
    data: Vec<f64>,
}

impl Field {
    pub fn new(grid: &Grid, kind: FieldKind, data: Vec<f64>) -> Result<Self> {
        let comps = kind.components(grid.n());
        if comps == 0 {
            return Err(Error::domain("a field needs at least one component"));
        }
        if data.len() != comps * grid.len() {
            return Err(Error::domain(format!(
                "{} field with {comps} components on {} samples needs {} values, got {}",
                kind.name(),
                grid.len(),
                comps * grid.len(),
                data.len()
            )));
        }
        if let Some(p) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::domain(format!("non-finite sample at position {p}")));
        }
        Ok(Self { grid: grid.clone(), kind, data })
    }

    /// Unchecked constructor for operator outputs.
    pub(crate) fn from_parts(grid: &Grid, kind: FieldKind, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), kind.components(grid.n()) * grid.len());
        Self { grid: grid.clone(), kind, data }
    }

    pub fn zeros(grid: &Grid, kind: FieldKind) -> Self {
        let len = kind.components(grid.n()) * grid.len();
        Self::from_parts(grid, kind, vec![0.0; len])
    }

    pub fn from_components(grid: &Grid, kind: FieldKind, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.len() != kind.components(grid.n()) {
            return Err(Error::domain(format!(
                "{} field expects {} components, got {}",
                kind.name(),
                kind.components(grid.n()),
                comps.len()
            )));
        }
        Self::new(grid, kind, comps.concat())
    }

    /// Samples `f(x, out)` at every grid point.
    pub fn sample(grid: &Grid, kind: FieldKind, f: impl Fn(&[f64], &mut [f64])) -> Result<Self> {
        let comps = kind.components(grid.n());
        let len = grid.len();
        let mut data = vec![0.0; comps * len];
        let mut x = vec![0.0; grid.n()];
        let mut out = vec![0.0; comps];
        for p in 0..len {
            grid.coords(p, &mut x);
            f(&x, &mut out);
            for (c, v) in out.iter().enumerate() {
                data[c * len + p] = *v;
            }
        }
        Self::new(grid, kind, data)
    }

    pub fn sample_scalar(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::sample(grid, FieldKind::Scalar, |x, out| out[0] = f(x))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn num_components(&self) -> usize {
        self.kind.components(self.grid.n())
    }

    pub fn dims(&self) -> (usize, usize) {
        self.kind.dims(self.grid.n())
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let len = self.grid.len();
        &self.data[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let len = self.grid.len();
        &mut self.data[c * len..(c + 1) * len]
    }

    pub fn components(&self) -> std::slice::Chunks<'_, f64> {
        self.data.chunks(self.grid.len())
    }

    /// Matrix entry `(r, c)`, 0-based.
    pub fn entry(&self, r: usize, c: usize) -> &[f64] {
        let (_, cols) = self.dims();
        self.component(r * cols + c)
    }

    /// Same samples reinterpreted under another kind of equal size.
    pub fn reshape(self, kind: FieldKind) -> Result<Self> {
        if kind.components(self.n()) != self.num_components() {
            return Err(Error::domain(format!(
                "cannot view {} components as {}",
                self.num_components(),
                kind.name()
            )));
        }
        Ok(Self { kind, ..self })
    }

    /// Row `r` of a matrix field as a vector field.
    pub fn row(&self, r: usize) -> Field {
        let (_, cols) = self.dims();
        let len = self.grid.len();
        let data = self.data[r * cols * len..(r + 1) * cols * len].to_vec();
        Field::from_parts(&self.grid, FieldKind::Vector(cols), data)
    }

    /// Column `c` of a matrix field as a vector field.
    pub fn column(&self, c: usize) -> Field {
        let (rows, _) = self.dims();
        let data = (0..rows).flat_map(|r| self.entry(r, c).iter().copied()).collect();
        Field::from_parts(&self.grid, FieldKind::Vector(rows), data)
    }

    /// Stacks fields with equal component counts as the rows of a matrix.
    pub fn from_rows(rows: &[Field]) -> Result<Field> {
        let first = rows.first().ok_or_else(|| Error::domain("no rows given"))?;
        let cols = first.num_components();
        for r in rows {
            first.check_compatible_grid(r)?;
            if r.num_components() != cols {
                return Err(Error::domain("rows have different lengths"));
            }
        }
        let data = rows.iter().flat_map(|r| r.data.iter().copied()).collect();
        Ok(Field::from_parts(
            &first.grid,
            FieldKind::Matrix { rows: rows.len(), cols },
            data,
        ))
    }

    /// Places fields with equal component counts as the columns of a matrix.
    pub fn from_columns(cols: &[Field]) -> Result<Field> {
        let first = cols.first().ok_or_else(|| Error::domain("no columns given"))?;
        let rows = first.num_components();
        for c in cols {
            first.check_compatible_grid(c)?;
            if c.num_components() != rows {
                return Err(Error::domain("columns have different lengths"));
            }
        }
        let mut comps = Vec::with_capacity(rows * cols.len());
        for r in 0..rows {
            for c in cols {
                comps.push(c.component(r));
            }
        }
        let data = comps.concat();
        Ok(Field::from_parts(
            &first.grid,
            FieldKind::Matrix { rows, cols: cols.len() },
            data,
        ))
    }

    pub fn transpose(&self) -> Field {
        let (rows, cols) = self.dims();
        let mut comps = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                comps.push(self.entry(r, c));
            }
        }
        Field::from_parts(&self.grid, FieldKind::Matrix { rows: cols, cols: rows }, comps.concat())
    }

    pub fn sym(&self) -> Result<Field> {
        self.check_square()?;
        Ok(self.add(&self.transpose())?.scale(0.5))
    }

    pub fn skew(&self) -> Result<Field> {
        self.check_square()?;
        Ok(self.sub(&self.transpose())?.scale(0.5))
    }

    /// `tr(P)` of a square matrix field.
    pub fn trace(&self) -> Result<Field> {
        let n = self.check_square()?;
        let mut out = vec![0.0; self.grid.len()];
        for i in 0..n {
            for (o, v) in out.iter_mut().zip(self.entry(i, i)) {
                *o += v;
            }
        }
        Ok(Field::from_parts(&self.grid, FieldKind::Scalar, out))
    }

    /// `s * Id_m` as a matrix field.
    pub fn scalar_identity(s: &Field, m: usize) -> Result<Field> {
        s.expect_kind(FieldKind::Scalar)?;
        let len = s.grid.len();
        let mut data = vec![0.0; m * m * len];
        for i in 0..m {
            data[(i * m + i) * len..][..len].copy_from_slice(&s.data);
        }
        Ok(Field::from_parts(&s.grid, FieldKind::Matrix { rows: m, cols: m }, data))
    }

    fn check_square(&self) -> Result<usize> {
        match self.kind {
            FieldKind::Matrix { rows, cols } if rows == cols => Ok(rows),
            _ => Err(Error::domain(format!(
                "expected a square matrix field, got {}",
                self.describe()
            ))),
        }
    }

    pub(crate) fn describe(&self) -> String {
        let (r, c) = self.dims();
        format!("{} field ({r}x{c})", self.kind.name())
    }

    pub fn expect_kind(&self, kind: FieldKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::domain(format!(
                "expected {} field with {} components, got {}",
                kind.name(),
                kind.components(self.n()),
                self.describe()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_compatible_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::config("fields live on different grids"));
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Field) -> Result<()> {
        self.check_compatible_grid(other)?;
        if self.dims() != other.dims() {
            return Err(Error::domain(format!(
                "shape mismatch: {} vs {}",
                self.describe(),
                other.describe()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Field::from_parts(&self.grid, self.kind, data))
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Field::from_parts(&self.grid, self.kind, data))
    }

    pub fn scale(&self, s: f64) -> Field {
        let data = self.data.iter().map(|a| a * s).collect();
        Field::from_parts(&self.grid, self.kind, data)
    }

    pub fn neg(&self) -> Field {
        self.scale(-1.0)
    }

    /// Multiplies every component pointwise by a scalar field.
    pub fn mul_scalar(&self, s: &Field) -> Result<Field> {
        s.expect_kind(FieldKind::Scalar)?;
        self.check_compatible_grid(s)?;
        let data = self
            .components()
            .flat_map(|c| c.iter().zip(&s.data).map(|(a, b)| a * b))
            .collect();
        Ok(Field::from_parts(&self.grid, self.kind, data))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs())))
    }

    /// `int <self, other> dx` by the periodic trapezoidal rule.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        self.check_same_shape(other)?;
        let sum: f64 = self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum();
        Ok(sum * self.grid.cell_volume())
    }

    /// `(int |self|^2 dx)^(1/2)`.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.data.iter().map(|a| a * a).sum();
        (sum * self.grid.cell_volume()).sqrt()
    }

    /// Pointwise `<self, other>` summed over components.
    pub fn dot(&self, other: &Field) -> Result<Field> {
        self.check_same_shape(other)?;
        let len = self.grid.len();
        let mut out = vec![0.0; len];
        for (a, b) in self.components().zip(other.components()) {
            for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
                *o += x * y;
            }
        }
        Ok(Field::from_parts(&self.grid, FieldKind::Scalar, out))
    }

    /// Mean of each component.
    pub fn means(&self) -> Vec<f64> {
        let len = self.grid.len() as f64;
        self.components().map(|c| c.iter().sum::<f64>() / len).collect()
    }

    /// Seeded random field whose Fourier support lies in `|k_i| <= band_i`.
    pub fn random_band_limited(grid: &Grid, kind: FieldKind, opts: &BandLimited) -> Result<Field> {
        let plan = SpectralPlan::new(grid)?;
        let band: Vec<usize> = match &opts.band {
            Some(b) if b.len() == grid.n() => b.clone(),
            Some(b) => {
                return Err(Error::domain(format!(
                    "band has {} entries for a grid of dimension {}",
                    b.len(),
                    grid.n()
                )))
            }
            None => grid.shape().iter().map(|m| m / 4).collect(),
        };
        if band.iter().zip(grid.shape()).any(|(b, m)| 2 * b >= *m) {
            return Err(Error::domain("band must stay below the Nyquist mode"));
        }
        let comps = kind.components(grid.n());
        let len = grid.len();
        let mut r = rng(opts.seed, opts.stream);
        let mut data = Vec::with_capacity(comps * len);
        let mut k = vec![0i64; grid.n()];
        for _ in 0..comps {
            let mut spec = vec![Complex64::default(); len];
            for (p, z) in spec.iter_mut().enumerate() {
                plan.wavevector(p, &mut k);
                let inside = k.iter().zip(&band).all(|(ki, b)| ki.unsigned_abs() as usize <= *b);
                let is_mean = k.iter().all(|&ki| ki == 0);
                if inside && !(is_mean && opts.zero_mean) {
                    *z = complex_normal(&mut r);
                }
            }
            data.extend(plan.inverse_real(spec));
        }
        let peak = data.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if opts.normalize && peak > 0.0 {
            data.iter_mut().for_each(|x| *x /= peak);
        }
        Field::new(grid, kind, data)
    }
}

fn complex_normal(r: &mut ChaCha8Rng) -> Complex64 {
    let re = normal(r);
    let im = normal(r);
    Complex64::new(re, im)
}

/// Options for [`Field::random_band_limited`].
///
/// Taking the real part of the inverse transform is the Hermitian
/// symmetrisation of the drawn coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct BandLimited {
    pub seed: u64,
    pub stream: u64,
    /// Per-axis band; `None` means `shape / 4`.
    pub band: Option<Vec<usize>>,
    pub zero_mean: bool,
    /// Scale so that the largest sample has magnitude 1.
    pub normalize: bool,
}

impl BandLimited {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0, band: None, zero_mean: false, normalize: true }
    }

    pub fn stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn band(mut self, band: usize, n: usize) -> Self {
        self.band = Some(vec![band; n]);
        self
    }

    pub fn zero_mean(mut self) -> Self {
        self.zero_mean = true;
        self
    }
}

/// Sum of `|c(k)|` over the modes of a single component outside `|k_i| <= band`.
pub fn spectral_tail(plan: &SpectralPlan, data: &[f64], band: usize) -> f64 {
    let spec = plan.forward(data);
    let mut k = vec![0i64; plan.grid().n()];
    let mut tail = 0.0;
    for (p, z) in spec.iter().enumerate() {
        plan.wavevector(p, &mut k);
        if k.iter().any(|ki| ki.unsigned_abs() as usize > band) {
            tail += z.norm();
        }
    }
    tail / data.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(&[8, 6]).unwrap()
    }

    #[test]
    fn constructor_checks() {
        let g = grid();
        assert!(Field::new(&g, FieldKind::Vector(2), vec![0.0; 95]).is_err());
        let mut bad = vec![0.0; 96];
        bad[7] = f64::NAN;
        assert!(Field::new(&g, FieldKind::Vector(2), bad).is_err());
        assert!(Field::new(&g, FieldKind::Cross, vec![1.0; 48]).is_ok());
        assert!(Field::new(&g, FieldKind::Vector(0), vec![]).is_err());
    }

    #[test]
    fn rows_columns_and_transpose() {
        let g = grid();
        let p = Field::sample(&g, FieldKind::Matrix { rows: 2, cols: 3 }, |x, out| {
            for (i, o) in out.iter_mut().enumerate() {
                *o = i as f64 + x[0];
            }
        })
        .unwrap();
        let t = p.transpose();
        assert_eq!(t.dims(), (3, 2));
        assert_eq!(t.entry(2, 1), p.entry(1, 2));
        assert_eq!(p.row(1).component(2), p.entry(1, 2));
        assert_eq!(p.column(2).component(1), p.entry(1, 2));
        let rows: Vec<Field> = (0..2).map(|r| p.row(r)).collect();
        assert_eq!(Field::from_rows(&rows).unwrap(), p);
        let cols: Vec<Field> = (0..3).map(|c| p.column(c)).collect();
        assert_eq!(Field::from_columns(&cols).unwrap(), p);
        assert_eq!(t.transpose(), p);
        assert!(p.sym().is_err());
    }

    #[test]
    fn sym_skew_trace() {
        let g = grid();
        let p = Field::sample(&g, FieldKind::Matrix { rows: 2, cols: 2 }, |x, out| {
            out.copy_from_slice(&[1.0, x[0], 2.0 * x[1], 3.0]);
        })
        .unwrap();
        let back = p.sym().unwrap().add(&p.skew().unwrap()).unwrap();
        assert!(back.max_abs_diff(&p).unwrap() < 1e-15);
        assert!(p.trace().unwrap().data().iter().all(|&v| v == 4.0));
        let id = Field::scalar_identity(&p.trace().unwrap(), 2).unwrap();
        assert_eq!(id.entry(0, 1).iter().sum::<f64>(), 0.0);
        assert_eq!(id.entry(1, 1)[3], 4.0);
    }

    #[test]
    fn quadrature() {
        let g = Grid::uniform(2, 16).unwrap();
        let f = Field::sample_scalar(&g, |x| x[0].sin()).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((f.inner(&f).unwrap() - 2.0 * pi2).abs() < 1e-12);
        assert!((f.l2_norm() - (2.0 * pi2).sqrt()).abs() < 1e-12);
        assert!(f.means()[0].abs() < 1e-15);
    }

    #[test]
    fn band_limited_fields() {
        let g = Grid::uniform(2, 16).unwrap();
        let opts = BandLimited::new(7).zero_mean();
        let f = Field::random_band_limited(&g, FieldKind::Vector(2), &opts).unwrap();
        assert!((f.max_abs() - 1.0).abs() < 1e-15);
        for m in f.means() {
            assert!(m.abs() < 1e-15);
        }
        let plan = SpectralPlan::new(&g).unwrap();
        for c in f.components() {
            assert!(spectral_tail(&plan, c, 4) < 1e-14);
            assert!(spectral_tail(&plan, c, 3) > 1e-3);
        }
        let again = Field::random_band_limited(&g, FieldKind::Vector(2), &opts).unwrap();
        assert_eq!(f, again);
        let other = Field::random_band_limited(&g, FieldKind::Vector(2), &opts.clone().stream(1)).unwrap();
        assert_ne!(f, other);
        assert!(Field::random_band_limited(&g, FieldKind::Scalar, &BandLimited::new(1).band(8, 2)).is_err());
    }
}
