//! Principal symbols of the first-order operators and ellipticity tests.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::algebra::{cross_dim, cross_matrix, Vector};
use crate::error::{Error, Result};
use crate::random::{rng, unit_vector};

/// Singular values at or below this count towards the kernel.
const NULL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolOperator {
    /// Symbol `[[b]]_n`, `N x n`.
    CurlN,
    /// Symbol `[[b]]_n^T`, `n x N`.
    AdjointCurl,
    /// Symbol `b` as an `n x 1` column.
    Grad,
    /// Symbol `b^T` as a `1 x n` row.
    Div,
}

impl SymbolOperator {
    pub fn name(&self) -> &'static str {
        match self {
            SymbolOperator::CurlN => "curl-n",
            SymbolOperator::AdjointCurl => "adjoint-curl",
            SymbolOperator::Grad => "grad",
            SymbolOperator::Div => "div",
        }
    }
}

impl fmt::Display for SymbolOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SymbolOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "curl-n" => Ok(SymbolOperator::CurlN),
            "adjoint-curl" => Ok(SymbolOperator::AdjointCurl),
            "grad" => Ok(SymbolOperator::Grad),
            "div" => Ok(SymbolOperator::Div),
            other => Err(Error::config(format!("unknown operator `{other}`"))),
        }
    }
}

pub fn symbol(b: &Vector, op: SymbolOperator) -> Result<DMatrix<f64>> {
    if b.iter().all(|x| *x == 0.0) {
        return Err(Error::domain("symbol requested at b = 0"));
    }
    let n = b.dim();
    Ok(match op {
        SymbolOperator::CurlN => cross_matrix(b).into_matrix(),
        SymbolOperator::AdjointCurl => cross_matrix(b).transpose(),
        SymbolOperator::Grad => DMatrix::from_column_slice(n, 1, b.as_slice()),
        SymbolOperator::Div => DMatrix::from_row_slice(1, n, b.as_slice()),
    })
}

/// `(b_3, -b_2, b_1)`, annihilated by `[[b]]_3^T`.
pub fn adjoint_curl_witness_3d(b: &Vector) -> Result<Vector> {
    if b.dim() != 3 {
        return Err(Error::domain(format!("expected a vector in R^3, got R^{}", b.dim())));
    }
    Vector::from_slice(&[b[2], -b[1], b[0]])
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticityReport {
    pub operator: SymbolOperator,
    pub n: usize,
    pub trials: usize,
    /// Smallest singular value of the symbol over all sampled unit `b`,
    /// counting missing dimensions of a wide symbol as zeros.
    pub min_singular_value: f64,
    /// Largest numerical nullity seen.
    pub max_nullity: usize,
    pub elliptic: bool,
    /// Direction `b` attaining the smallest singular value.
    pub b: Vec<f64>,
    /// Unit kernel vector at that `b` when the symbol is singular.
    pub witness: Option<Vec<f64>>,
    /// `|S w|_inf` for the witness.
    pub witness_residual: Option<f64>,
    /// Worst `|[[b]]_3^T (b_3, -b_2, b_1)|_inf` (adjoint curl, `n = 3`).
    pub explicit_witness_residual: Option<f64>,
}

/// Samples `trials` unit frequencies and reports injectivity of the symbol.
pub fn ellipticity_report(op: SymbolOperator, n: usize, trials: usize, seed: u64) -> Result<EllipticityReport> {
    cross_dim(n)?;
    if trials == 0 {
        return Err(Error::domain("at least one trial is needed"));
    }
    let mut r = rng(seed, 1000 + n as u64);
    let mut report = EllipticityReport {
        operator: op,
        n,
        trials,
        min_singular_value: f64::INFINITY,
        max_nullity: 0,
        elliptic: true,
        b: Vec::new(),
        witness: None,
        witness_residual: None,
        explicit_witness_residual: None,
    };
    for _ in 0..trials {
        let b = Vector::new(unit_vector(&mut r, n))?;
        let s = symbol(&b, op)?;
        let gram = s.transpose() * &s;
        let eig = SymmetricEigen::new(gram);
        let (idx, lambda) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &l)| if l < acc.1 { (i, l) } else { acc });
        let sigma = lambda.max(0.0).sqrt();
        let nullity = eig.eigenvalues.iter().filter(|&&l| l.max(0.0).sqrt() <= NULL_TOL).count();
        report.max_nullity = report.max_nullity.max(nullity);
        if sigma < report.min_singular_value {
            report.min_singular_value = sigma;
            report.b = b.as_slice().to_vec();
            if nullity > 0 {
                let w = eig.eigenvectors.column(idx).into_owned();
                let res = (&s * &w).amax();
                report.witness = Some(w.as_slice().to_vec());
                report.witness_residual = Some(res);
            } else {
                report.witness = None;
                report.witness_residual = None;
            }
        }
        if op == SymbolOperator::AdjointCurl && n == 3 {
            let w = adjoint_curl_witness_3d(&b)?;
            let res = (&s * w.as_dvector()).amax();
            let worst = report.explicit_witness_residual.unwrap_or(0.0).max(res);
            report.explicit_witness_residual = Some(worst);
        }
    }
    report.elliptic = report.max_nullity == 0 && report.min_singular_value > NULL_TOL;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    #[test]
    fn symbols_have_expected_shapes() {
        let b = v(&[0.3, -0.4, 1.2, 0.5]);
        assert_eq!(symbol(&b, SymbolOperator::CurlN).unwrap().shape(), (6, 4));
        assert_eq!(symbol(&b, SymbolOperator::AdjointCurl).unwrap().shape(), (4, 6));
        assert_eq!(symbol(&b, SymbolOperator::Grad).unwrap().shape(), (4, 1));
        assert_eq!(symbol(&b, SymbolOperator::Div).unwrap().shape(), (1, 4));
        assert!(symbol(&Vector::zeros(3).unwrap(), SymbolOperator::Grad).is_err());
        let s = symbol(&b, SymbolOperator::CurlN).unwrap();
        assert!((s * b.as_dvector()).amax() < 1e-15);
    }

    #[test]
    fn two_dimensional_adjoint_is_injective() {
        let s = symbol(&v(&[0.6, 0.8]), SymbolOperator::AdjointCurl).unwrap();
        assert_eq!(s, DMatrix::from_column_slice(2, 1, &[-0.8, 0.6]));
        let r = ellipticity_report(SymbolOperator::AdjointCurl, 2, 200, 3).unwrap();
        assert!(r.elliptic);
        assert!(r.min_singular_value >= 1.0 - 1e-12);
        assert!(r.witness.is_none());
    }

    #[test]
    fn three_dimensional_witness() {
        let b = v(&[0.2, -1.4, 0.9]);
        let w = adjoint_curl_witness_3d(&b).unwrap();
        assert_eq!(w.as_slice(), &[0.9, 1.4, 0.2]);
        let s = symbol(&b, SymbolOperator::AdjointCurl).unwrap();
        assert!((s * w.as_dvector()).amax() <= 1e-15);
        let r = ellipticity_report(SymbolOperator::AdjointCurl, 3, 100, 3).unwrap();
        assert!(!r.elliptic);
        assert_eq!(r.max_nullity, 1);
        assert!(r.witness_residual.unwrap() < 1e-12);
        assert!(r.explicit_witness_residual.unwrap() <= 1e-14);
    }

    #[test]
    fn higher_dimensions_are_not_elliptic() {
        for n in 4..=5 {
            let r = ellipticity_report(SymbolOperator::AdjointCurl, n, 50, 9).unwrap();
            assert!(!r.elliptic);
            assert_eq!(r.max_nullity, n * (n - 1) / 2 - (n - 1));
        }
        let r = ellipticity_report(SymbolOperator::CurlN, 4, 50, 9).unwrap();
        assert_eq!(r.max_nullity, 1);
        let w = r.witness.unwrap();
        let b = r.b;
        let cos = w.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>().abs();
        assert!((cos - 1.0).abs() < 1e-10);
        assert!(ellipticity_report(SymbolOperator::Grad, 3, 20, 1).unwrap().elliptic);
        assert!(!ellipticity_report(SymbolOperator::Div, 3, 20, 1).unwrap().elliptic);
    }
}
