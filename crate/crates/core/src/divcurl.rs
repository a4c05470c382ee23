//! Oscillating families `u^k`, `v^k` whose divergence and `curl_n` do not
//! depend on `k`, the weak limit of `<u^k, v^k>`, and the Fourier-multiplier
//! identities behind the potentials `psi = div Lap^-1 u`, `g = curl_n Lap^-1 u`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::calculus::Operators;
use crate::error::{Error, Result};
use crate::field::{BandLimited, Field, FieldKind};
use crate::grid::Grid;
use crate::random::DEFAULT_SEED;

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatoryFamily {
    pub base: Field,
    /// Axis of the oscillation wavevector, 1-based.
    pub axis: usize,
    /// Component carrying the oscillation, 1-based.
    pub direction: usize,
    pub amplitude: f64,
    pub k_values: Vec<usize>,
}

impl OscillatoryFamily {
    /// `amplitude sin(k x_axis) e_direction`.
    pub fn oscillation(&self, k: usize) -> Result<Field> {
        let g = self.base.grid();
        let n = g.n();
        let (axis, dir, amp) = (self.axis - 1, self.direction - 1, self.amplitude);
        Field::sample(g, FieldKind::Vector(n), |x, out| {
            out.fill(0.0);
            out[dir] = amp * (k as f64 * x[axis]).sin();
        })
    }

    pub fn member(&self, k: usize) -> Result<Field> {
        self.base.add(&self.oscillation(k)?)
    }
}

fn check_k_values(k_values: &[usize]) -> Result<()> {
    if k_values.is_empty() || k_values[0] == 0 || k_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(format!(
            "k values must be strictly increasing positive integers, got {k_values:?}"
        )));
    }
    Ok(())
}

/// `u^k = u + A sin(k x_axis) e_p` with `p != axis`, and
/// `v^k = v + A sin(k x_axis) e_axis`.
pub fn build_families(
    u: &Field,
    v: &Field,
    axis: usize,
    amplitude: f64,
    k_values: &[usize],
) -> Result<(OscillatoryFamily, OscillatoryFamily)> {
    let n = u.n();
    u.expect_kind(FieldKind::Vector(n))?;
    v.expect_kind(FieldKind::Vector(n))?;
    if u.grid() != v.grid() {
        return Err(Error::domain("u and v live on different grids"));
    }
    if !(1..=n).contains(&axis) {
        return Err(Error::domain(format!("axis must lie in 1..={n}, got {axis}")));
    }
    if !amplitude.is_finite() {
        return Err(Error::domain("amplitude must be finite"));
    }
    check_k_values(k_values)?;
    let p = axis % n + 1;
    let fam = |base: &Field, direction| OscillatoryFamily {
        base: base.clone(),
        axis,
        direction,
        amplitude,
        k_values: k_values.to_vec(),
    };
    Ok((fam(u, p), fam(v, axis)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakPairingReport {
    pub k_values: Vec<usize>,
    /// `int phi <u^k, v^k> dx` per `k`.
    pub pairing_values: Vec<f64>,
    /// `int phi <u, v> dx`.
    pub limit_value: f64,
    pub deviations: Vec<f64>,
    /// Least-squares slope of `log deviation` against `log k`; `None` when a
    /// deviation vanishes.
    pub decay_exponent: Option<f64>,
}

impl WeakPairingReport {
    /// Whether deviations are non-increasing over `k >= k_min`.
    pub fn non_increasing_from(&self, k_min: usize) -> bool {
        let tail: Vec<f64> =
            self.k_values.iter().zip(&self.deviations).filter(|(k, _)| **k >= k_min).map(|(_, d)| *d).collect();
        tail.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn final_deviation(&self) -> f64 {
        self.deviations.last().copied().unwrap_or(0.0)
    }

    pub fn records(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "limit_value={:.6e}", self.limit_value);
        for ((k, p), d) in self.k_values.iter().zip(&self.pairing_values).zip(&self.deviations) {
            let _ = writeln!(out, "k={k} pairing={p:.6e} deviation={d:.6e}");
        }
        match self.decay_exponent {
            Some(e) => {
                let _ = writeln!(out, "decay_exponent={e:.6e}");
            }
            None => out.push_str("decay_exponent=none\n"),
        }
        out
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("k,pairing,deviation\n");
        for ((k, p), d) in self.k_values.iter().zip(&self.pairing_values).zip(&self.deviations) {
            let _ = writeln!(out, "{k},{p:.6e},{d:.6e}");
        }
        out
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_decay_exponent(x: &[usize], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 3 || y.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| (*v as f64).ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn pairing(phi: &Field, u: &Field, v: &Field) -> Result<f64> {
    let dot = u.dot(v)?;
    let h = phi.grid().cell_volume();
    Ok(phi.data().iter().zip(dot.data()).map(|(a, b)| a * b).sum::<f64>() * h)
}

pub fn weak_pairing(fam_u: &OscillatoryFamily, fam_v: &OscillatoryFamily, phi: &Field) -> Result<WeakPairingReport> {
    let g = fam_u.base.grid();
    phi.expect_kind(FieldKind::Scalar)?;
    if phi.grid() != g || fam_v.base.grid() != g {
        return Err(Error::domain("families and test function live on different grids"));
    }
    if fam_u.k_values != fam_v.k_values || fam_u.axis != fam_v.axis {
        return Err(Error::domain("families use different oscillation axes or k values"));
    }
    let k_values = fam_u.k_values.clone();
    if k_values.len() < 3 {
        return Err(Error::precondition(format!(
            "the decay fit needs at least 3 k values, got {}",
            k_values.len()
        )));
    }
    let m = g.shape()[fam_u.axis - 1];
    if let Some(k) = k_values.iter().find(|k| 4 * **k > m) {
        return Err(Error::precondition(format!("k = {k} is not resolved by {m} samples (need k <= {})", m / 4)));
    }
    let limit_value = pairing(phi, &fam_u.base, &fam_v.base)?;
    let pairing_values = k_values
        .par_iter()
        .map(|&k| pairing(phi, &fam_u.member(k)?, &fam_v.member(k)?))
        .collect::<Result<Vec<f64>>>()?;
    let deviations: Vec<f64> = pairing_values.iter().map(|p| (p - limit_value).abs()).collect();
    let decay_exponent = fit_decay_exponent(&k_values, &deviations);
    Ok(WeakPairingReport { k_values, pairing_values, limit_value, deviations, decay_exponent })
}

/// `Lap^-1` componentwise by division with `-|k|^2` on mean-zero fields.
pub fn inverse_laplacian(ops: &Operators, f: &Field) -> Result<Field> {
    let plan = ops.require_plan()?;
    ops.check(f)?;
    let scale = f.max_abs().max(1.0);
    if let Some(m) = f.means().into_iter().find(|m| m.abs() > 1e-12 * scale) {
        return Err(Error::precondition(format!(
            "the inverse Laplacian needs mean-zero components, found mean {m:.3e}"
        )));
    }
    let g = ops.grid();
    let mut k = vec![0i64; g.n()];
    let factor: Vec<f64> = (0..g.len())
        .map(|p| {
            plan.wavevector(p, &mut k);
            let k2: i64 = k.iter().map(|x| x * x).sum();
            if k2 == 0 { 0.0 } else { -1.0 / k2 as f64 }
        })
        .collect();
    let data: Vec<f64> = f
        .components()
        .flat_map(|c| {
            let spec: Vec<Complex64> = plan.forward(c).into_iter().zip(&factor).map(|(z, s)| z * *s).collect();
            plan.inverse_real(spec)
        })
        .collect();
    Field::new(g, f.kind(), data)
}

/// `(max |Lap^-1 div f - div Lap^-1 f|, max |Lap^-1 curl_n f - curl_n Lap^-1 f|)`.
pub fn commutation_residuals(ops: &Operators, f: &Field) -> Result<(f64, f64)> {
    let inv = inverse_laplacian(ops, f)?;
    let div = inverse_laplacian(ops, &ops.div(f)?)?.max_abs_diff(&ops.div(&inv)?)?;
    let curl = inverse_laplacian(ops, &ops.curl_n(f)?)?.max_abs_diff(&ops.curl_n(&inv)?)?;
    Ok((div, curl))
}

/// `psi = div Lap^-1 u` and `g = curl_n Lap^-1 u`.
pub fn potential_split(ops: &Operators, u: &Field) -> Result<(Field, Field)> {
    let inv = inverse_laplacian(ops, u)?;
    Ok((ops.div(&inv)?, ops.curl_n(&inv)?))
}

/// `max |grad psi + [[nabla]]^T g - u|`.
pub fn potential_split_residual(ops: &Operators, u: &Field) -> Result<f64> {
    let (psi, g) = potential_split(ops, u)?;
    ops.grad(&psi)?.add(&ops.adjoint_curl(&g)?)?.max_abs_diff(u)
}

/// `r sin x / (1 - 2 r cos x + r^2) = sum_m r^m sin(m x)`.
pub fn poisson_profile(r: f64, x: f64) -> f64 {
    r * x.sin() / (1.0 - 2.0 * r * x.cos() + r * r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoConfig {
    pub n: usize,
    pub shape: usize,
    pub k_values: Vec<usize>,
    pub amplitude: f64,
    /// 1-based.
    pub axis: usize,
    pub seed: u64,
    /// Ratio of the profile added along the oscillation axis.
    pub profile_ratio: f64,
    pub band: usize,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            n: 2,
            shape: 128,
            k_values: vec![4, 8, 16, 32],
            amplitude: 1.0,
            axis: 1,
            seed: DEFAULT_SEED,
            profile_ratio: 0.7,
            band: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoReport {
    pub pairing: WeakPairingReport,
    /// `max_k |div u^k - div u|`.
    pub div_drift: f64,
    /// `max_k |curl_n v^k - curl_n v|`.
    pub curl_drift: f64,
    pub commutation_div: f64,
    pub commutation_curl: f64,
    pub split_residual: f64,
}

impl DemoReport {
    pub fn records(&self) -> String {
        let mut out = self.pairing.records();
        for (key, value) in [
            ("div_drift", self.div_drift),
            ("curl_drift", self.curl_drift),
            ("commutation_div", self.commutation_div),
            ("commutation_curl", self.commutation_curl),
            ("split_residual", self.split_residual),
        ] {
            let _ = writeln!(out, "{key}={value:.6e}");
        }
        out
    }
}

/// Base fields of the demonstration: seeded band-limited mean-zero fields,
/// with a Poisson profile in `x_axis` added to `u_axis` and `v_p`, so that
/// the oscillating cross terms have non-vanishing, decaying integrals.
pub fn demo_fields(ops: &Operators, cfg: &DemoConfig) -> Result<(Field, Field)> {
    let g = ops.grid();
    let n = g.n();
    if !(1..=n).contains(&cfg.axis) {
        return Err(Error::domain(format!("axis must lie in 1..={n}, got {}", cfg.axis)));
    }
    let axis = cfg.axis - 1;
    let p = (axis + 1) % n;
    let opts = |stream| BandLimited::new(cfg.seed).stream(stream).band(cfg.band, n).zero_mean();
    let mut u = Field::random_band_limited(g, FieldKind::Vector(n), &opts(1))?;
    let mut v = Field::random_band_limited(g, FieldKind::Vector(n), &opts(2))?;
    let profile = Field::sample_scalar(g, |x| poisson_profile(cfg.profile_ratio, x[axis]))?;
    u.component_mut(axis).iter_mut().zip(profile.data()).for_each(|(a, b)| *a += b);
    v.component_mut(p).iter_mut().zip(profile.data()).for_each(|(a, b)| *a += b);
    Ok((u, v))
}

pub fn run_demo(cfg: &DemoConfig) -> Result<DemoReport> {
    let grid = Grid::uniform(cfg.n, cfg.shape)?;
    let ops = Operators::spectral(&grid)?;
    let (u, v) = demo_fields(&ops, cfg)?;
    let (fu, fv) = build_families(&u, &v, cfg.axis, cfg.amplitude, &cfg.k_values)?;
    let axis = cfg.axis - 1;
    let phi = Field::sample_scalar(&grid, |x| 1.0 + x[axis].cos())?;
    let pairing = weak_pairing(&fu, &fv, &phi)?;

    let div_u = ops.div(&u)?;
    let curl_v = ops.curl_n(&v)?;
    let drifts = cfg
        .k_values
        .par_iter()
        .map(|&k| {
            let d = ops.div(&fu.member(k)?)?.max_abs_diff(&div_u)?;
            let c = ops.curl_n(&fv.member(k)?)?.max_abs_diff(&curl_v)?;
            Ok((d, c))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let div_drift = drifts.iter().fold(0.0f64, |a, d| a.max(d.0));
    let curl_drift = drifts.iter().fold(0.0f64, |a, d| a.max(d.1));
    let (commutation_div, commutation_curl) = commutation_residuals(&ops, &u)?;
    let split_residual = potential_split_residual(&ops, &u)?;
    Ok(DemoReport { pairing, div_drift, curl_drift, commutation_div, commutation_curl, split_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ops(n: usize, m: usize) -> Operators {
        Operators::spectral(&Grid::uniform(n, m).unwrap()).unwrap()
    }

    fn random(o: &Operators, stream: u64) -> Field {
        let n = o.grid().n();
        Field::random_band_limited(o.grid(), FieldKind::Vector(n), &BandLimited::new(5).stream(stream).zero_mean())
            .unwrap()
    }

    fn low_band(o: &Operators, stream: u64) -> Field {
        let n = o.grid().n();
        let opts = BandLimited::new(5).stream(stream).band(2, n).zero_mean();
        Field::random_band_limited(o.grid(), FieldKind::Vector(n), &opts).unwrap()
    }

    #[test]
    fn families_preserve_constraints() {
        let o = ops(3, 16);
        let (u, v) = (random(&o, 1), random(&o, 2));
        let (fu, fv) = build_families(&u, &v, 2, 0.7, &[1, 2, 4]).unwrap();
        assert_eq!((fu.direction, fv.direction), (3, 2));
        for k in [1, 2, 4] {
            assert!(o.div(&fu.member(k).unwrap()).unwrap().max_abs_diff(&o.div(&u).unwrap()).unwrap() <= 1e-12);
            let c = o.curl_n(&fv.member(k).unwrap()).unwrap();
            assert!(c.max_abs_diff(&o.curl_n(&v).unwrap()).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn family_errors() {
        let o = ops(2, 8);
        let u = random(&o, 1);
        assert!(matches!(build_families(&u, &u, 0, 1.0, &[1, 2]), Err(Error::Domain(_))));
        assert!(matches!(build_families(&u, &u, 3, 1.0, &[1, 2]), Err(Error::Domain(_))));
        assert!(matches!(build_families(&u, &u, 1, 1.0, &[2, 2]), Err(Error::Domain(_))));
        assert!(matches!(build_families(&u, &u, 1, 1.0, &[0, 2]), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_amplitude_gives_zero_deviation() {
        let o = ops(2, 32);
        let u = random(&o, 1);
        let (fu, fv) = build_families(&u, &u, 1, 0.0, &[2, 4, 8]).unwrap();
        let phi = Field::sample_scalar(o.grid(), |x| 1.0 + x[0].cos()).unwrap();
        let r = weak_pairing(&fu, &fv, &phi).unwrap();
        assert!(r.deviations.iter().all(|d| *d == 0.0));
        assert_eq!(r.decay_exponent, None);
    }

    #[test]
    fn constant_test_function_sees_no_cross_terms() {
        let o = ops(2, 32);
        let u = low_band(&o, 1);
        let v = low_band(&o, 2);
        let (fu, fv) = build_families(&u, &v, 1, 1.0, &[4, 6, 8]).unwrap();
        let phi = Field::sample_scalar(o.grid(), |_| 1.0).unwrap();
        let r = weak_pairing(&fu, &fv, &phi).unwrap();
        assert!(r.deviations.iter().all(|d| *d <= 1e-12), "{:?}", r.deviations);
    }

    #[test]
    fn unresolved_k_is_rejected() {
        let o = ops(2, 32);
        let u = random(&o, 1);
        let phi = Field::sample_scalar(o.grid(), |_| 1.0).unwrap();
        let (fu, fv) = build_families(&u, &u, 1, 1.0, &[4, 8, 9]).unwrap();
        assert!(matches!(weak_pairing(&fu, &fv, &phi), Err(Error::Precondition(_))));
        let (fu, fv) = build_families(&u, &u, 1, 1.0, &[4, 8]).unwrap();
        assert!(matches!(weak_pairing(&fu, &fv, &phi), Err(Error::Precondition(_))));
    }

    #[test]
    fn decay_fit() {
        let k = [4, 8, 16, 32];
        let y: Vec<f64> = k.iter().map(|k| 3.0 * (*k as f64).powf(-1.5)).collect();
        assert!((fit_decay_exponent(&k, &y).unwrap() + 1.5).abs() < 1e-12);
        assert_eq!(fit_decay_exponent(&k[..2], &y[..2]), None);
        assert_eq!(fit_decay_exponent(&k, &[1.0, 0.0, 1.0, 1.0]), None);
    }

    #[test]
    fn commutation_and_split() {
        let o = ops(3, 8);
        let f = random(&o, 3);
        let (a, b) = commutation_residuals(&o, &f).unwrap();
        assert!(a <= 1e-10 && b <= 1e-10, "{a} {b}");
        assert!(potential_split_residual(&o, &f).unwrap() <= 1e-10);
        let zero = Field::zeros(o.grid(), FieldKind::Vector(3));
        assert_eq!(commutation_residuals(&o, &zero).unwrap(), (0.0, 0.0));
        let o2 = ops(2, 16);
        let single = Field::sample(o2.grid(), FieldKind::Vector(2), |x, out| {
            out.copy_from_slice(&[(2.0 * x[0] + 3.0 * x[1]).sin(), (x[0] - x[1]).cos()])
        })
        .unwrap();
        let (a, b) = commutation_residuals(&o2, &single).unwrap();
        assert!(a <= 1e-13 && b <= 1e-13, "{a} {b}");
        let shifted = f.add(&Field::sample(o.grid(), FieldKind::Vector(3), |_, out| out.fill(1.0)).unwrap()).unwrap();
        assert!(matches!(inverse_laplacian(&o, &shifted), Err(Error::Precondition(_))));
    }

    #[test]
    fn inverse_laplacian_inverts_the_laplacian() {
        let o = ops(2, 16);
        let f = random(&o, 4);
        let back = o.laplacian(&inverse_laplacian(&o, &f).unwrap()).unwrap();
        assert!(back.max_abs_diff(&f).unwrap() <= 1e-12);
    }

    #[test]
    fn poisson_profile_series() {
        let (r, x) = (0.8f64, 1.3);
        let series: f64 = (1..400).map(|m| r.powi(m) * (m as f64 * x).sin()).sum();
        assert!((poisson_profile(r, x) - series).abs() < 1e-12);
    }

    #[test]
    fn default_demo() {
        let r = run_demo(&DemoConfig::default()).unwrap();
        let p = &r.pairing;
        assert!(p.decay_exponent.unwrap() <= -0.9, "{}", r.records());
        assert!(p.non_increasing_from(8));
        assert!(p.final_deviation() <= 1e-2);
        assert!(r.commutation_div <= 1e-10 && r.commutation_curl <= 1e-10);
        assert!(r.div_drift <= 1e-12 && r.curl_drift <= 1e-12, "{}", r.records());
        assert!(r.split_residual <= 1e-10);
    }
}
