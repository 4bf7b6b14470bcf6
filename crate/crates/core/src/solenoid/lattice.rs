use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebraic::{FieldElement, NumberField, PvStatus};
use crate::error::{Error, Result};

/// Largest forecast size `2 L gamma` accepted by [`enumerate_y`].
pub const MAX_ENUMERATION: f64 = 1e7;

/// Integrality tolerance of [`in_u`].
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// The neighbourhood `U(m, eps)`: `y` such that `V D^{-m} (y, s)` is an
/// integer vector for some `|s_k| < eps_k`, `k = 2..d`.
#[derive(Debug, Clone, PartialEq)]
pub struct UNeighborhood {
    pub m: i64,
    eps: Vec<f64>,
}

impl UNeighborhood {
    /// `eps` is indexed by the conjugates `alpha_2, ..., alpha_d` in field
    /// order; the two members of a complex pair must share a value.
    pub fn new(field: &NumberField, m: i64, eps: Vec<f64>) -> Result<Self> {
        let d = field.degree();
        if eps.len() + 1 != d {
            return Err(Error::InvalidInput(format!(
                "eps needs {} entries for degree {d}, got {}",
                d - 1,
                eps.len()
            )));
        }
        if eps.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidInput("eps entries must be positive".into()));
        }
        let roots = &field.roots()[1..];
        for k in 0..roots.len() {
            if roots[k].im > 0.0 && k + 1 < roots.len() && eps[k] != eps[k + 1] {
                return Err(Error::InvalidInput(format!(
                    "conjugate pair {} and {} needs equal eps",
                    k + 2,
                    k + 3
                )));
            }
        }
        Ok(UNeighborhood { m, eps })
    }

    /// The same `eps` for every conjugate.
    pub fn uniform(field: &NumberField, m: i64, eps: f64) -> Result<Self> {
        Self::new(field, m, vec![eps; field.degree().saturating_sub(1)])
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }
}

/// `W(L) = V D^{-m} ((-L, L) x prod (|s_k| < eps_k))` with its density `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeCylinder {
    pub l: f64,
    pub u: UNeighborhood,
    gamma: f64,
}

impl LatticeCylinder {
    pub fn new(field: &NumberField, l: f64, u: UNeighborhood) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidInput("L must be positive".into()));
        }
        let gamma = gamma_for(field, &u)?;
        Ok(LatticeCylinder { l, u, gamma })
    }

    /// `vol W(L) / (2L)`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// `|det V| |c_0|^{-m} 2^a (2 pi)^b prod_k eps_k`, the volume of `W(L)` per
/// unit length of `L`. A complex pair contributes the disk area `pi eps^2`
/// times the Jacobian 2 of `(s, conj s) -> (Re s, Im s)`.
fn gamma_for(field: &NumberField, u: &UNeighborhood) -> Result<f64> {
    let det = field.matrices()?.det_v().norm();
    let c0 = (field.c0().unsigned_abs() as f64).powi(-(u.m as i32));
    let a = field.real_conjugates() as i32;
    let b = field.complex_pairs() as i32;
    let prod: f64 = u.eps().iter().product();
    Ok(det * c0 * 2f64.powi(a) * (2.0 * PI).powi(b) * prod)
}

pub fn gamma_density(field: &NumberField, cyl: &LatticeCylinder) -> f64 {
    debug_assert!((gamma_for(field, &cyl.u).unwrap_or(f64::NAN) - cyl.gamma).abs() <= 1e-12 * cyl.gamma);
    cyl.gamma
}

/// Floating-point data of the map `w -> D^m V^{-1} w`.
struct Geometry {
    /// `alpha_k^m V^{-1}[k, i]`.
    rows: Vec<Vec<Complex64>>,
    roots: Vec<Complex64>,
}

impl Geometry {
    fn new(field: &NumberField, m: i64) -> Result<Self> {
        let mats = field.matrices()?;
        let d = field.degree();
        let roots = field.roots().to_vec();
        let rows = (0..d)
            .map(|k| {
                let scale = roots[k].powi(m as i32);
                (0..d).map(|i| scale * mats.v_inv()[(k, i)]).collect()
            })
            .collect();
        Ok(Geometry { rows, roots })
    }

    /// `(y, s_2, ..., s_d) = D^m V^{-1} w`.
    fn preimage(&self, w: &[f64]) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(w).map(|(c, &x)| c * x).sum())
            .collect()
    }
}

/// A lattice point `w` with `(y, s) = D^m V^{-1} w` and the exact field
/// element `lambda` with `sigma_1(lambda) = xi(w)` and `sigma_k(lambda) = s_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct UWitness {
    pub w: Vec<i64>,
    pub lambda: FieldElement,
    pub s: Vec<Complex64>,
}

/// Exact coefficients of `P(X) / ((X - alpha) P'(alpha))` in `Q[alpha]`: the
/// trace-dual basis of `1, alpha, ..., alpha^{d-1}`.
pub fn dual_basis(field: &NumberField) -> Result<Vec<FieldElement>> {
    let d = field.degree();
    let alpha = field.alpha_element();
    // synthetic division of P by X - alpha over Q[alpha]
    let mut b = vec![FieldElement::zero(d); d];
    b[d - 1] = FieldElement::one(d);
    for i in (0..d - 1).rev() {
        let c = FieldElement::rational(d, BigRational::from_integer(field.coeffs()[i + 1].into()));
        b[i] = &c + &field.mul(&alpha, &b[i + 1]);
    }
    // P'(alpha) = sum_i i c_i alpha^{i-1} with c_d = 1
    let mut dp = FieldElement::zero(d);
    for i in 1..=d {
        let ci = if i == d { 1 } else { field.coeffs()[i] };
        let term = field
            .alpha_power(i as i64 - 1)
            .scale(&BigRational::from_integer((ci * i as i64).into()));
        dp = &dp + &term;
    }
    let inv = field
        .inverse(&dp)?
        .ok_or(Error::Degenerate)?;
    Ok(b.iter().map(|x| field.mul(x, &inv)).collect())
}

/// `lambda(w) = alpha^m sum_i w_i q_i` for the dual basis `q_i`.
fn lambda_of(field: &NumberField, dual: &[FieldElement], w: &[i64], m: i64) -> FieldElement {
    let d = field.degree();
    let mut acc = FieldElement::zero(d);
    for (q, &wi) in dual.iter().zip(w) {
        if wi != 0 {
            acc = &acc + &q.scale(&BigRational::from_integer(wi.into()));
        }
    }
    field.mul(&acc, &field.alpha_power(m))
}

fn check_pv(field: &NumberField) -> Result<()> {
    if field.pv_status() == PvStatus::Pv {
        Ok(())
    } else {
        Err(Error::NotPisot)
    }
}

/// Whether `y` lies in `U(m, eps)`, with the witness.
///
/// Candidate integer vectors come from the box that
/// `V D^{-m} ({y} x prod(-eps_k, eps_k))` spans; a candidate counts when the
/// residual of `V D^{-m} (y, s) - w` is within [`INTEGRALITY_TOL`] and the
/// implied `s` lies inside the neighbourhood. Accepted vectors are confirmed
/// exactly: `T(lambda alpha^{i-m}) = w_i`.
pub fn in_u(field: &NumberField, y: f64, u: &UNeighborhood) -> Result<Option<UWitness>> {
    check_pv(field)?;
    if !y.is_finite() {
        return Err(Error::InvalidInput("y must be finite".into()));
    }
    let d = field.degree();
    if u.eps().len() + 1 != d {
        return Err(Error::InvalidInput("neighbourhood does not match the field".into()));
    }
    let geo = Geometry::new(field, u.m)?;
    let a = field.alpha();
    let m = u.m;
    let mut ranges = Vec::with_capacity(d);
    for i in 0..d as i64 {
        let c = y * a.powi((i - m) as i32);
        let h: f64 = geo.roots[1..]
            .iter()
            .zip(u.eps())
            .map(|(z, e)| z.norm().powi((i - m) as i32) * e)
            .sum::<f64>()
            + INTEGRALITY_TOL;
        ranges.push(((c - h).ceil() as i64, (c + h).floor() as i64));
    }
    let total: f64 = ranges.iter().map(|(lo, hi)| (hi - lo + 1).max(0) as f64).product();
    if total > 1e7 {
        return Err(Error::Size { forecast: total, limit: 1e7 });
    }
    let mut found: Option<Vec<i64>> = None;
    for_each_point(&ranges, |w| {
        if found.is_some() {
            return;
        }
        let wf: Vec<f64> = w.iter().map(|&x| x as f64).collect();
        let v = geo.preimage(&wf);
        let dy = v[0].re - y;
        let resid = (0..d as i64)
            .map(|i| (a.powi((i - m) as i32) * dy).abs())
            .fold(0.0, f64::max);
        let inside = v[1..].iter().zip(u.eps()).all(|(s, &e)| s.norm() < e);
        if resid <= INTEGRALITY_TOL && inside {
            found = Some(w.to_vec());
        }
    });
    let Some(w) = found else { return Ok(None) };
    let dual = dual_basis(field)?;
    let lambda = lambda_of(field, &dual, &w, m);
    for (i, &wi) in w.iter().enumerate() {
        let t = field.trace(&field.mul(&lambda, &field.alpha_power(i as i64 - m)))?;
        if t != BigRational::from_integer(wi.into()) {
            return Err(Error::Precision(format!("exact check failed at coordinate {i}")));
        }
    }
    let s = field.conjugates(&lambda)[1..].to_vec();
    Ok(Some(UWitness { w, lambda, s }))
}

/// Calls `f` on every integer point of the box, last coordinate fastest.
fn for_each_point(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    if ranges.iter().any(|(lo, hi)| hi < lo) {
        return;
    }
    let mut p: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&p);
        let mut i = ranges.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if p[i] < ranges[i].1 {
                p[i] += 1;
                break;
            }
            p[i] = ranges[i].0;
        }
    }
}

/// The sorted set `Y(L) = xi(W(L) ∩ Z^d)` with bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct YEnumeration {
    pub points: Vec<f64>,
    /// Adjacent outputs closer than `1e-12 max(1, |y|)`; zero when `xi` is injective.
    pub duplicates: usize,
    /// Integer vectors examined.
    pub candidates: u64,
}

impl YEnumeration {
    pub fn density(&self, l: f64) -> f64 {
        self.points.len() as f64 / (2.0 * l)
    }
}

/// Enumerates `Y(L)`.
///
/// For each first coordinate `w_0` the remaining coordinates lie within
/// `alpha^i w_0 ± sum_k |alpha_k^i - alpha^i| |alpha_k|^{-m} eps_k`, so only a
/// thin slab of the bounding box is visited. Slabs run in parallel and are
/// merged in order.
pub fn enumerate_y(field: &NumberField, cyl: &LatticeCylinder) -> Result<YEnumeration> {
    check_pv(field)?;
    let forecast = 2.0 * cyl.l * cyl.gamma;
    if forecast >= MAX_ENUMERATION {
        return Err(Error::Size { forecast, limit: MAX_ENUMERATION });
    }
    let d = field.degree();
    let m = cyl.u.m;
    let eps = cyl.u.eps();
    let geo = Geometry::new(field, m)?;
    let a = field.alpha();
    let conj = &geo.roots[1..];
    let w0_half = a.abs().powi(-(m as i32)) * cyl.l
        + conj
            .iter()
            .zip(eps)
            .map(|(z, e)| z.norm().powi(-(m as i32)) * e)
            .sum::<f64>();
    let w0_max = w0_half.floor() as i64 + 1;
    let widths: Vec<f64> = (1..d as i32)
        .map(|i| {
            conj.iter()
                .zip(eps)
                .map(|(z, e)| (z.powi(i) - a.powi(i)).norm() * z.norm().powi(-(m as i32)) * e)
                .sum::<f64>()
                + 1e-9
        })
        .collect();
    let l = cyl.l;
    let slabs: Vec<(Vec<f64>, u64)> = (-w0_max..=w0_max)
        .into_par_iter()
        .map(|w0| {
            let mut ranges = vec![(w0, w0)];
            for (i, h) in widths.iter().enumerate() {
                let c = a.powi(i as i32 + 1) * w0 as f64;
                ranges.push(((c - h).ceil() as i64, (c + h).floor() as i64));
            }
            let mut ys = Vec::new();
            let mut count = 0u64;
            for_each_point(&ranges, |w| {
                count += 1;
                let wf: Vec<f64> = w.iter().map(|&x| x as f64).collect();
                let v = geo.preimage(&wf);
                if v[0].re.abs() < l && v[1..].iter().zip(eps).all(|(s, &e)| s.norm() < e) {
                    ys.push(v[0].re);
                }
            });
            (ys, count)
        })
        .collect();
    let candidates = slabs.iter().map(|s| s.1).sum();
    let mut points: Vec<f64> = slabs.into_iter().flat_map(|s| s.0).collect();
    points.sort_by(f64::total_cmp);
    let duplicates = points
        .windows(2)
        .filter(|p| (p[1] - p[0]).abs() <= 1e-12 * p[0].abs().max(1.0))
        .count();
    Ok(YEnumeration { points, duplicates, candidates })
}

/// Monte Carlo estimate of `vol W(1) / 2` from uniform samples of its
/// bounding box. Independent of the closed form behind [`LatticeCylinder`].
pub fn monte_carlo_gamma(field: &NumberField, u: &UNeighborhood, samples: usize, seed: u64) -> Result<f64> {
    let d = field.degree();
    let geo = Geometry::new(field, u.m)?;
    let m = u.m;
    let half: Vec<f64> = (0..d as i32)
        .map(|i| {
            geo.roots[0].norm().powi(i - m as i32)
                + geo.roots[1..]
                    .iter()
                    .zip(u.eps())
                    .map(|(z, e)| z.norm().powi(i - m as i32) * e)
                    .sum::<f64>()
        })
        .collect();
    let box_vol: f64 = half.iter().map(|h| 2.0 * h).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    let mut w = vec![0.0; d];
    for _ in 0..samples {
        for (x, h) in w.iter_mut().zip(&half) {
            *x = rng.random_range(-*h..*h);
        }
        let v = geo.preimage(&w);
        if v[0].re.abs() < 1.0 && v[1..].iter().zip(u.eps()).all(|(s, &e)| s.norm() < e) {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64 * box_vol / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn golden() -> NumberField {
        NumberField::new(&[-1, -1]).unwrap()
    }

    #[test]
    fn dual_basis_is_trace_dual() {
        for c in [vec![-1, -1], vec![-1, -1, 0], vec![-2, -2], vec![-1, 0, 0, -1]] {
            let f = NumberField::new(&c).unwrap();
            let q = dual_basis(&f).unwrap();
            for (i, qi) in q.iter().enumerate() {
                for j in 0..f.degree() {
                    let t = f.trace(&f.mul(qi, &f.alpha_power(j as i64))).unwrap();
                    let e = if i == j { BigRational::one() } else { BigRational::zero() };
                    assert_eq!(t, e, "{c:?} {i} {j}");
                }
            }
        }
    }

    #[test]
    fn in_u_examples() {
        let f = golden();
        let u = UNeighborhood::uniform(&f, 0, 0.1).unwrap();
        let zero = in_u(&f, 0.0, &u).unwrap().unwrap();
        assert_eq!(zero.w, vec![0, 0]);
        assert!(in_u(&f, 0.5, &u).unwrap().is_none());
        // L_40 = alpha^40 + beta^40 lies within 1e-8 of xi(L_40, L_41)
        let lucas40 = 228_826_127.0;
        let hit = in_u(&f, lucas40, &u).unwrap().unwrap();
        assert_eq!(hit.w, vec![228_826_127, 370_248_451]);
        let beta: f64 = (1.0 - 5f64.sqrt()) / 2.0;
        // s is recovered from 9-digit coordinates, so only absolutely accurate
        assert!((hit.s[0].re - beta.powi(40)).abs() < 1e-7);
        assert!(in_u(&NumberField::new(&[-2, 0]).unwrap(), 0.0, &u).is_err());
    }

    #[test]
    fn gamma_values() {
        let f = golden();
        let u = UNeighborhood::uniform(&f, 0, 0.1).unwrap();
        let c = LatticeCylinder::new(&f, 100.0, u).unwrap();
        assert!((c.gamma() - 5f64.sqrt() * 0.2).abs() < 1e-14);
        let c2 = LatticeCylinder::new(&f, 100.0, UNeighborhood::uniform(&f, 0, 0.2).unwrap()).unwrap();
        assert!((c2.gamma() - 2.0 * c.gamma()).abs() < 1e-14);
        let c3 = LatticeCylinder::new(&f, 100.0, UNeighborhood::uniform(&f, 5, 0.1).unwrap()).unwrap();
        assert!((c3.gamma() - c.gamma()).abs() < 1e-14);
    }

    #[test]
    fn gamma_matches_volume() {
        for (c, m, e) in [(vec![-1, -1], 0, 0.1), (vec![-1, -1, 0], 0, 0.3), (vec![-2, -2], 1, 0.2)] {
            let f = NumberField::new(&c).unwrap();
            let u = UNeighborhood::uniform(&f, m, e).unwrap();
            let g = LatticeCylinder::new(&f, 1.0, u.clone()).unwrap().gamma();
            let mc = monte_carlo_gamma(&f, &u, 400_000, 3).unwrap();
            assert!((mc - g).abs() < 0.03 * g, "{c:?}: {mc} vs {g}");
        }
    }

    #[test]
    fn small_enumeration_round_trip() {
        let f = golden();
        let u = UNeighborhood::uniform(&f, 0, 0.1).unwrap();
        let cyl = LatticeCylinder::new(&f, 50.0, u.clone()).unwrap();
        let y = enumerate_y(&f, &cyl).unwrap();
        assert_eq!(y.duplicates, 0);
        assert!(!y.points.is_empty());
        for &p in &y.points {
            assert!(in_u(&f, p, &u).unwrap().is_some(), "{p}");
        }
    }

    #[test]
    fn neighbourhood_validation() {
        let f = NumberField::new(&[-1, -1, 0]).unwrap();
        assert!(UNeighborhood::new(&f, 0, vec![0.1, 0.2]).is_err());
        assert!(UNeighborhood::new(&f, 0, vec![0.1]).is_err());
        assert!(UNeighborhood::new(&f, 0, vec![0.1, -0.1]).is_err());
        assert!(UNeighborhood::new(&f, 0, vec![0.1, 0.1]).is_ok());
    }
}
