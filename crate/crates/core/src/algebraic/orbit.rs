use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{dist_to_int, FieldElement, NumberField, PvStatus};
use crate::error::{Error, Result};
use crate::numeric;

/// Exact traces `s(n) = T(mu alpha^n)` for `n` in `[n_min, n_max]`.
///
/// The first `d` values come from exact traces; the rest follow the linear
/// recurrence of the minimal polynomial, run forward and backward.
pub(crate) fn power_traces(
    field: &NumberField,
    mu: &FieldElement,
    n_min: i64,
    n_max: i64,
) -> Result<(i64, Vec<BigRational>)> {
    field.check_dim(mu)?;
    let d = field.degree() as i64;
    let lo = n_min.min(0);
    let hi = n_max.max(d - 1);
    let len = (hi - lo + 1) as usize;
    let mut s = vec![BigRational::zero(); len];
    let idx = |n: i64| (n - lo) as usize;
    let mut e = mu.clone();
    let alpha = field.alpha_element();
    for n in 0..d {
        s[idx(n)] = field.trace(&e)?;
        e = field.mul(&e, &alpha);
    }
    let c: Vec<BigRational> = field
        .coeffs()
        .iter()
        .map(|&x| BigRational::from_integer(x.into()))
        .collect();
    let du = d as usize;
    for n in d..=hi {
        let mut acc = BigRational::zero();
        for (i, ci) in c.iter().enumerate() {
            acc -= ci * &s[idx(n - d + i as i64)];
        }
        s[idx(n)] = acc;
    }
    for n in (lo..0).rev() {
        // c_0 s(n) = -s(n + d) - sum_{i=1}^{d-1} c_i s(n + i)
        let mut acc = -s[idx(n + d)].clone();
        for i in 1..du {
            acc -= &c[i] * &s[idx(n + i as i64)];
        }
        s[idx(n)] = acc / &c[0];
    }
    Ok((lo, s))
}

/// `s(j) = T(mu alpha^j)` for `j = 0..=j_max`.
pub fn trace_power_sequence(
    field: &NumberField,
    mu: &FieldElement,
    j_max: usize,
) -> Result<Vec<BigRational>> {
    if j_max + 1 < field.degree() {
        return Err(Error::InvalidInput(format!(
            "j_max = {j_max} must be at least d - 1 = {}",
            field.degree() - 1
        )));
    }
    let (lo, s) = power_traces(field, mu, 0, j_max as i64)?;
    debug_assert_eq!(lo, 0);
    Ok(s[..=j_max].to_vec())
}

/// Whether `T(mu alpha^j)` is an integer for `j = 0, ..., d-1`.
pub fn pisot_set_test(field: &NumberField, mu: &FieldElement) -> Result<bool> {
    if field.pv_status() != PvStatus::Pv {
        return Err(Error::NotPisot);
    }
    field.check_dim(mu)?;
    if mu.is_zero() {
        return Err(Error::InvalidInput("mu must be nonzero".into()));
    }
    let (_, s) = power_traces(field, mu, 0, field.degree() as i64 - 1)?;
    Ok(s.iter().all(|q| q.is_integer()))
}

/// Fractional parts of `lambda alpha^n` along a stretch of the orbit.
///
/// Where `|lambda alpha^n|` exceeds the conjugate residue
/// `r(n) = sum_{k>=2} sigma_k(lambda) alpha_k^n`, the value is taken from the
/// exact trace: `lambda alpha^n = s(n) - r(n)`. Otherwise it is evaluated
/// directly. Either way no large floating-point number is reduced modulo 1.
#[derive(Debug, Clone)]
pub struct OrbitPhases {
    lo: i64,
    traces: Vec<BigRational>,
    lead: f64,
    alpha: f64,
    conj: Vec<Complex64>,
    roots: Vec<Complex64>,
}

impl OrbitPhases {
    pub fn new(field: &NumberField, lambda: &FieldElement, n_min: i64, n_max: i64) -> Result<Self> {
        let (lo, traces) = power_traces(field, lambda, n_min, n_max)?;
        let conj = field.conjugates(lambda);
        Ok(OrbitPhases {
            lo,
            traces,
            lead: conj[0].re,
            alpha: field.alpha(),
            conj: conj[1..].to_vec(),
            roots: field.roots()[1..].to_vec(),
        })
    }

    pub fn trace(&self, n: i64) -> &BigRational {
        &self.traces[(n - self.lo) as usize]
    }

    /// `sum_{k>=2} sigma_k(lambda) alpha_k^n`, real by conjugate symmetry.
    pub fn residue(&self, n: i64) -> f64 {
        self.conj
            .iter()
            .zip(&self.roots)
            .map(|(c, z)| (c * z.powi(n as i32)).re)
            .sum()
    }

    fn residue_bound(&self, n: i64) -> f64 {
        self.conj
            .iter()
            .zip(&self.roots)
            .map(|(c, z)| c.norm() * z.norm().powi(n as i32))
            .sum()
    }

    /// A real number congruent to `lambda alpha^n` modulo 1, of size at most
    /// `max(1, |r(n)|)` on the trace route.
    pub fn reduced(&self, n: i64) -> f64 {
        self.reduced_mod(n, 1)
    }

    /// A real number congruent to `lambda alpha^n` modulo `m >= 1`.
    pub fn reduced_mod(&self, n: i64, m: i64) -> f64 {
        let direct = self.lead * self.alpha.powi(n as i32);
        if direct.abs() <= self.residue_bound(n) || direct.abs() <= m as f64 {
            direct
        } else {
            let s = self.trace(n);
            let m = BigRational::from_integer(m.into());
            let q = s - (s / &m).floor() * &m;
            q.to_f64().unwrap_or(f64::NAN) - self.residue(n)
        }
    }

    /// `lambda alpha^n mod 1` in `[0, 1)`.
    pub fn frac(&self, n: i64) -> f64 {
        numeric::frac(self.reduced(n))
    }

    /// `|| lambda alpha^n ||`.
    pub fn dist(&self, n: i64) -> f64 {
        dist_to_int(self.reduced(n))
    }
}

/// Orbit distances `||lambda alpha^j||` with the conjugate bound and the fitted
/// exponential decay rate.
#[derive(Debug, Clone)]
pub struct HomoclinicProfile {
    /// Smallest `m >= 0` with `lambda alpha^m` passing the trace test.
    pub shift: i64,
    pub points: Vec<(i64, f64)>,
    /// `sum_{k>=2} |sigma_k(lambda)| |alpha_k|^j` for `j >= shift`.
    pub bounds: Vec<(i64, f64)>,
    /// Least-squares slope of log block maxima over the second half of the
    /// range `j >= shift`.
    pub slope: f64,
    /// `ln max_{k>=2} |alpha_k|`.
    pub expected_slope: f64,
    pub bound_holds: bool,
}

const MAX_SHIFT: i64 = 64;
const BLOCK: usize = 8;

pub fn homoclinic_profile(
    field: &NumberField,
    lambda: &FieldElement,
    j_min: i64,
    j_max: i64,
) -> Result<HomoclinicProfile> {
    if j_min > j_max {
        return Err(Error::InvalidInput("empty j range".into()));
    }
    let shift = (0..=MAX_SHIFT)
        .find(|&m| {
            let mu = field.mul(lambda, &field.alpha_power(m));
            pisot_set_test(field, &mu).unwrap_or(false)
        })
        .ok_or_else(|| {
            if field.pv_status() != PvStatus::Pv {
                Error::NotPisot
            } else {
                Error::InvalidInput(format!(
                    "lambda alpha^m fails the trace test for all 0 <= m <= {MAX_SHIFT}"
                ))
            }
        })?;
    let orbit = OrbitPhases::new(field, lambda, j_min, j_max)?;
    let points: Vec<(i64, f64)> = (j_min..=j_max).map(|j| (j, orbit.dist(j))).collect();
    let bounds: Vec<(i64, f64)> = (j_min.max(shift)..=j_max)
        .map(|j| (j, orbit.residue_bound(j)))
        .collect();
    let by_j = |j: i64| points[(j - j_min) as usize].1;
    let bound_holds = bounds
        .iter()
        .all(|&(j, b)| by_j(j) <= b * (1.0 + 1e-9) + 1e-15);
    let tail: Vec<(i64, f64)> = points
        .iter()
        .copied()
        .filter(|&(j, _)| j >= shift)
        .collect();
    let tail = &tail[tail.len() / 2..];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for block in tail.chunks(BLOCK) {
        if let Some(&(j, v)) = block.iter().max_by(|a, b| a.1.total_cmp(&b.1)) {
            if v > 0.0 && block.len() == BLOCK.min(tail.len()) {
                xs.push(j as f64);
                ys.push(v.ln());
            }
        }
    }
    let slope = numeric::lsq_slope(&xs, &ys).unwrap_or(f64::NAN);
    Ok(HomoclinicProfile {
        shift,
        points,
        bounds,
        slope,
        expected_slope: field.max_conjugate_modulus().ln(),
        bound_holds,
    })
}
