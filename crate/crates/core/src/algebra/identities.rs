//! Randomised residual checks for the algebraic identities of `x_n`.
//!
//! Each check draws standard-normal operands from a seeded stream and
//! records the largest residual `max|lhs - rhs|` divided by a scale built
//! from the operand norms (documented per check).

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Result;
use crate::random::{normals, rng};

/// Largest relative residual of one identity over all trials.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub max_rel_residual: f64,
}

struct Tracker {
    entries: Vec<IdentityResidual>,
}

impl Tracker {
    fn record(&mut self, name: &'static str, residual: f64, scale: f64) {
        let rel = residual / scale.max(f64::MIN_POSITIVE);
        match self.entries.iter_mut().find(|e| e.name == name) {
            Some(e) => e.max_rel_residual = e.max_rel_residual.max(rel),
            None => self.entries.push(IdentityResidual { name, max_rel_residual: rel }),
        }
    }
}

fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).fold(0.0, |acc, (p, q)| acc.max((p - q).abs()))
}

fn mdiff(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    debug_assert_eq!(x.shape(), y.shape());
    max_abs_diff(x.as_slice(), y.as_slice())
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |acc, p| acc.max(p.abs()))
}

fn random_vector(r: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::new(normals(r, n)).expect("normals are finite")
}

fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_vec(rows, cols, normals(r, rows * cols))
}

/// Compares the inductive cross product with the coordinate formula, and
/// `[[a]]_n b` with both.
pub fn oracle_suite(n: usize, trials: usize, seed: u64) -> Result<Vec<IdentityResidual>> {
    cross_dim(n)?;
    let mut r = rng(seed, 2 * n as u64);
    let mut t = Tracker { entries: Vec::new() };
    for _ in 0..trials {
        let a = random_vector(&mut r, n);
        let b = random_vector(&mut r, n);
        let scale = a.norm() * b.norm();
        let inductive = cross(&a, &b)?;
        let oracle = cross_oracle(&a, &b)?;
        let via_matrix = cross_matrix(&a).mul_vec(&b)?;
        t.record("inductive_vs_oracle", max_abs_diff(inductive.as_slice(), oracle.as_slice()), scale);
        t.record("matrix_vs_inductive", max_abs_diff(via_matrix.as_slice(), inductive.as_slice()), scale);
        t.record("matrix_vs_oracle", max_abs_diff(via_matrix.as_slice(), oracle.as_slice()), scale);
    }
    Ok(t.entries)
}

/// Runs every identity check for dimension `n`.
pub fn identity_suite(n: usize, trials: usize, seed: u64) -> Result<Vec<IdentityResidual>> {
    let big = cross_dim(n)?;
    let mut r = rng(seed, 2 * n as u64 + 1);
    let mut t = Tracker { entries: Vec::new() };
    let id_n = DMatrix::<f64>::identity(n, n);

    for trial in 0..trials {
        let a = random_vector(&mut r, n);
        let b = random_vector(&mut r, n);
        let c = random_vector(&mut r, n);
        let d = random_vector(&mut r, n);
        let lambda = normals(&mut r, 1)[0];
        let (na, nb, nc, nd) = (a.norm(), b.norm(), c.norm(), d.norm());

        let axb = cross(&a, &b)?;
        let bxa = cross(&b, &a)?;
        let bxc = cross(&b, &c)?;
        let cxd = cross(&c, &d)?;
        let cxb = cross(&c, &b)?;
        let ca = cross_matrix(&a);
        let cb = cross_matrix(&b);

        // bilinearity and anti-commutativity
        let a_lc = Vector::from_dvector(a.as_dvector() + c.as_dvector() * lambda).unwrap();
        let lhs = cross(&a_lc, &b)?;
        let rhs = axb.as_dvector() + cross(&c, &b)?.as_dvector() * lambda;
        t.record("bilinearity", max_abs_diff(lhs.as_slice(), rhs.as_slice()), (na + lambda.abs() * nc) * nb);
        let neg: Vec<f64> = bxa.as_slice().iter().map(|x| -x).collect();
        t.record("anticommutativity", max_abs_diff(axb.as_slice(), &neg), na * nb);
        let par = Vector::from_dvector(a.as_dvector() * lambda).unwrap();
        t.record("parallel", max_abs(cross(&a, &par)?.as_slice()), na * na * lambda.abs());

        // Lagrange and area
        let lhs = axb.as_dvector().dot(cxd.as_dvector());
        let rhs = a.dot(&c) * b.dot(&d) - a.dot(&d) * b.dot(&c);
        t.record("lagrange", (lhs - rhs).abs(), na * nb * nc * nd);
        let lhs = axb.as_dvector().norm_squared();
        let rhs = na * na * nb * nb - a.dot(&b).powi(2);
        t.record("area", (lhs - rhs).abs(), na * na * nb * nb);

        // cross / skew link
        let skew_ab = outer(&a, &b) - outer(&b, &a);
        t.record("cross_skew_link", mdiff(&skew_from_vec(&axb).to_matrix(), &skew_ab), na * nb);
        let half = SkewMatrix::from_matrix(&skew(&outer(&a, &b)), 0.0)?;
        let twice: Vec<f64> = vec_from_skew(&half).as_slice().iter().map(|x| 2.0 * x).collect();
        t.record("cross_skew_half", max_abs_diff(axb.as_slice(), &twice), na * nb);

        // scalar triple
        let frak = CrossVector::new(n, normals(&mut r, big))?;
        let lhs = frak.as_dvector().dot(bxc.as_dvector());
        let rhs = (cb.transpose() * frak.as_dvector()).dot(&c);
        t.record("scalar_triple", (lhs - rhs).abs(), frak.as_dvector().norm() * nb * nc);
        let orth = grassmann_triple(&b, &frak)?.dot(&b);
        t.record("scalar_triple_orthogonality", orth.abs(), frak.as_dvector().norm() * nb * nb);

        // Grassmann, both equalities
        let g = grassmann_triple(&a, &bxc)?;
        let rhs1 = c.as_dvector() * a.dot(&b) - b.as_dvector() * a.dot(&c);
        t.record("grassmann", max_abs_diff(g.as_slice(), rhs1.as_slice()), na * nb * nc);
        let rhs2 = -(skew_from_vec(&bxc).to_matrix() * a.as_dvector());
        t.record("grassmann_skew_form", max_abs_diff(g.as_slice(), rhs2.as_slice()), na * nb * nc);

        // Jacobi, both forms
        let j = jacobi_sum(&a, &b, &c)?;
        t.record("jacobi", max_abs(j.as_slice()), na * nb * nc);
        let j2 = skew_from_vec(&bxc).to_matrix() * a.as_dvector()
            + skew_from_vec(&cross(&c, &a)?).to_matrix() * b.as_dvector()
            + skew_from_vec(&axb).to_matrix() * c.as_dvector();
        t.record("jacobi_skew_form", max_abs(j2.as_slice()), na * nb * nc);

        // Room identity and consequences
        let room = room_product(&a, &b)?;
        let expected = &id_n * b.dot(&a) - outer(&b, &a);
        t.record("room", mdiff(&room, &expected), na * nb);
        let room_bb = room_product(&b, &b)?;
        t.record("room_bb", mdiff(&room_bb, &(&id_n * (nb * nb) - outer(&b, &b))), nb * nb);
        t.record("room_trace", (room.trace() - (n - 1) as f64 * a.dot(&b)).abs(), n as f64 * na * nb);
        let frob = ca.as_matrix().dot(cb.as_matrix());
        t.record("room_frobenius", (frob - (n - 1) as f64 * a.dot(&b)).abs(), n as f64 * na * nb);
        t.record("dyad_converse", mdiff(&dyad_from_room(&a, &b)?, &outer(&b, &a)), na * nb);
        let comm = &room - room_product(&b, &a)?;
        t.record("room_commutator", mdiff(&comm, &skew_from_vec(&axb).to_matrix()), na * nb);

        // cross product with matrices
        let m = 1 + trial % 4;
        let am = DVector::from_vec(normals(&mut r, m));
        let nam = am.norm();
        let lhs = cross_right(&outer(&am, &b), &c)?;
        let rhs = outer(&am, bxc.as_dvector());
        t.record("dyadic_cross", mdiff(&lhs, &rhs), nam * nb * nc);
        t.record("dyadic_cross_own", max_abs(cross_right(&outer(&am, &b), &b)?.as_slice()), nam * nb * nb);
        let lhs = cross_right(&outer(&b, &a), &b)?;
        let via_sym = cross_right(&(sym(&outer(&a, &b)) * 2.0), &b)?;
        let via_skew = cross_right(&(skew(&outer(&a, &b)) * -2.0), &b)?;
        let via_dyad = outer(&b, axb.as_dvector());
        let scale = na * nb * nb;
        t.record("dyadic_cross_sym", mdiff(&lhs, &via_sym), scale);
        t.record("dyadic_cross_skew", mdiff(&lhs, &via_skew), scale);
        t.record("dyadic_cross_dyad", mdiff(&lhs, &via_dyad), scale);
        let bm = random_matrix(&mut r, n, m);
        let left = cross_left(&b, &bm)?;
        let right = cross_right(&bm.transpose(), &b)?;
        t.record("cross_left_transpose", mdiff(&left.transpose(), &(-right)), bm.norm() * nb);

        // [[a]] x_n b block structure
        if n >= 3 {
            let ab = Vector::from_slice(&a.as_slice()[..n - 1])?;
            let bb = Vector::from_slice(&b.as_slice()[..n - 1])?;
            let (alpha, beta) = (a[n - 1], b[n - 1]);
            let top = (n - 1) * (n - 2) / 2;
            let mut blocks = DMatrix::zeros(big, big);
            blocks.view_mut((0, 0), (top, top)).copy_from(&matrix_cross_block(&ab, &bb)?);
            blocks.view_mut((0, top), (top, n - 1)).copy_from(&(cross_matrix(&ab).into_matrix() * beta));
            blocks.view_mut((top, 0), (n - 1, top)).copy_from(&(cross_matrix(&bb).transpose() * alpha));
            let corner = -outer(&ab, &bb) - DMatrix::identity(n - 1, n - 1) * (alpha * beta);
            blocks.view_mut((top, top), (n - 1, n - 1)).copy_from(&corner);
            t.record("matrix_cross_block_form", mdiff(&matrix_cross_block(&a, &b)?, &blocks), na * nb);
        }
        let bb_block = matrix_cross_block(&b, &b)?;
        t.record("matrix_cross_block_bb", mdiff(&bb_block, &-(cb.as_matrix() * cb.transpose())), nb * nb);

        // simultaneous cross product
        let p = random_matrix(&mut r, n, n);
        let np = p.norm();
        let s = simultaneous_cross(&b, &p)?;
        t.record("simultaneous_sym", mdiff(&simultaneous_cross(&b, &sym(&p))?, &sym(&s)), nb * nb * np);
        t.record("simultaneous_skew", mdiff(&simultaneous_cross(&b, &skew(&p))?, &skew(&s)), nb * nb * np);
        t.record(
            "simultaneous_transpose",
            mdiff(&s.transpose(), &simultaneous_cross(&b, &p.transpose())?),
            nb * nb * np,
        );
        let lhs = simultaneous_cross(&b, &outer(&a, &c))?;
        let rhs = outer(bxa.as_dvector(), cxb.as_dvector());
        t.record("simultaneous_dyadic", mdiff(&lhs, &rhs), nb * nb * na * nc);
        let own = simultaneous_cross(&b, &outer(&a, &b))?;
        let own_t = simultaneous_cross(&b, &outer(&b, &a))?;
        t.record("simultaneous_dyadic_own", max_abs(own.as_slice()).max(max_abs(own_t.as_slice())), nb * nb * na * nb);
        t.record("simultaneous_identity", mdiff(&simultaneous_cross(&b, &id_n)?, &bb_block), nb * nb);

        // sandwich products
        let q = random_matrix(&mut r, big, big);
        let nq = q.norm();
        let sw = sandwich(&b, &q)?;
        t.record("sandwich_sym", mdiff(&sym(&sw), &sandwich(&b, &sym(&q))?), nb * nb * nq);
        t.record("sandwich_skew", mdiff(&skew(&sw), &sandwich(&b, &skew(&q))?), nb * nb * nq);
        let sid = sandwich(&b, &DMatrix::identity(big, big))?;
        t.record("sandwich_identity", mdiff(&sid, &(&id_n * (nb * nb) - outer(&b, &b))), nb * nb);

        // [[b]] [[b]]^T [[b]] = |b|^2 [[b]]
        let triple = cb.as_matrix() * cb.transpose() * cb.as_matrix();
        t.record("curl_triple", mdiff(&triple, &(cb.as_matrix() * (nb * nb))), nb * nb * nb);
    }
    Ok(t.entries)
}
