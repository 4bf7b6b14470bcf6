//! Finite windows of the solenoid `T^Z`: the orbit map `theta`, the shift, the
//! lifted symbol `A` with `â = A ∘ theta`, and lattice neighbourhoods.

mod lattice;

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebraic::{FieldElement, NumberField, OrbitPhases};
use crate::error::{Error, Result};
use crate::numeric::frac;
use crate::refinement::RefinementMask;

pub use lattice::{
    dual_basis, enumerate_y, gamma_density, in_u, monte_carlo_gamma, LatticeCylinder, UNeighborhood,
    UWitness, YEnumeration,
};

/// Largest `|y alpha^j|` reduced modulo 1 in floating point by [`theta`].
pub const THETA_BUDGET: f64 = (1u64 << 25) as f64;

/// A point of `T^Z` restricted to the indices `j_min..=j_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolenoidWindow {
    j_min: i64,
    vals: Vec<f64>,
}

impl SolenoidWindow {
    /// Values are reduced into `[0, 1)`.
    pub fn new(j_min: i64, vals: Vec<f64>) -> Result<Self> {
        if vals.is_empty() {
            return Err(Error::EmptyWindow);
        }
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("window values must be finite".into()));
        }
        Ok(SolenoidWindow { j_min, vals: vals.into_iter().map(frac).collect() })
    }

    pub fn zeros(j_min: i64, j_max: i64) -> Result<Self> {
        if j_max < j_min {
            return Err(Error::EmptyWindow);
        }
        Self::new(j_min, vec![0.0; (j_max - j_min + 1) as usize])
    }

    pub fn j_min(&self) -> i64 {
        self.j_min
    }

    pub fn j_max(&self) -> i64 {
        self.j_min + self.vals.len() as i64 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    pub fn contains(&self, j: i64) -> bool {
        j >= self.j_min && j <= self.j_max()
    }

    pub fn get(&self, j: i64) -> Option<f64> {
        self.contains(j).then(|| self.vals[(j - self.j_min) as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.vals.iter().enumerate().map(move |(i, &v)| (self.j_min + i as i64, v))
    }

    /// `rho_n(g) = (g(0), ..., g(n-1))`.
    pub fn rho(&self, n: usize) -> Option<Vec<f64>> {
        (0..n as i64).map(|j| self.get(j)).collect()
    }

    /// `(sigma^k g)(j) = g(j + k)`, kept on the part of the original index
    /// window where it is known.
    pub fn shift(&self, k: i64) -> Result<Self> {
        let lo = self.j_min.max(self.j_min - k);
        let hi = self.j_max().min(self.j_max() - k);
        if hi < lo {
            return Err(Error::EmptyWindow);
        }
        let vals = (lo..=hi).map(|j| self.vals[(j + k - self.j_min) as usize]).collect();
        Ok(SolenoidWindow { j_min: lo, vals })
    }

    /// Largest circular distance of any coordinate from 0.
    pub fn max_dist_to_zero(&self) -> f64 {
        self.vals.iter().map(|&v| v.min(1.0 - v)).fold(0.0, f64::max)
    }
}

impl fmt::Display for SolenoidWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, v) in self.iter() {
            writeln!(f, "{j},{v}")?;
        }
        Ok(())
    }
}

/// `theta(y)(j) = y alpha^j mod 1` on `j_min..=j_max`.
pub fn theta(field: &NumberField, y: f64, j_min: i64, j_max: i64) -> Result<SolenoidWindow> {
    if j_max < j_min {
        return Err(Error::EmptyWindow);
    }
    if !y.is_finite() {
        return Err(Error::InvalidInput("y must be finite".into()));
    }
    let a = field.alpha();
    let size = |j: i64| y.abs() * a.abs().powi(j as i32);
    let worst = size(j_max).max(size(j_min));
    if worst > THETA_BUDGET {
        let mut ok = j_max;
        while ok >= j_min && size(ok) > THETA_BUDGET {
            ok -= 1;
        }
        return Err(Error::Precision(format!(
            "|y alpha^j| reaches {worst:.3e} > 2^25; use j_max <= {ok} or an exact lambda"
        )));
    }
    let vals = (j_min..=j_max).map(|j| y * a.powi(j as i32)).collect();
    SolenoidWindow::new(j_min, vals)
}

/// `theta(lambda)` for `lambda` in `Q[alpha]`, exact modulo 1 for any window.
pub fn theta_exact(
    field: &NumberField,
    lambda: &FieldElement,
    j_min: i64,
    j_max: i64,
) -> Result<SolenoidWindow> {
    if j_max < j_min {
        return Err(Error::EmptyWindow);
    }
    let orbit = OrbitPhases::new(field, lambda, j_min, j_max)?;
    SolenoidWindow::new(j_min, (j_min..=j_max).map(|j| orbit.frac(j)).collect())
}

/// `A(g) = |alpha|^{-1} sum_k a(k) exp(-2 pi i sum_j tau_k(j) g(j))`.
pub fn eval_a(mask: &RefinementMask, g: &SolenoidWindow) -> Result<DMatrix<Complex64>> {
    let (lo, hi) = mask.exponent_range();
    if !(g.contains(lo) && g.contains(hi)) {
        return Err(Error::WindowTooSmall {
            need_min: lo,
            need_max: hi,
            have_min: g.j_min(),
            have_max: g.j_max(),
        });
    }
    Ok(mask.symbol_from_phases(|_, tau| {
        tau.support()
            .iter()
            .map(|(&j, &c)| c as f64 * g.vals[(j - g.j_min) as usize])
            .sum()
    }))
}

/// Whether `g` restricted to its window lies in the kernel
/// `{g : g(k) = 0 for k >= 0, c_0^{-k} g(k) = 0 for k < 0}`.
pub fn kernel_window_test(field: &NumberField, g: &SolenoidWindow) -> Result<bool> {
    if !(g.j_min() < 0 && g.j_max() >= 0) {
        return Err(Error::InvalidInput(
            "window must contain negative and nonnegative indices".into(),
        ));
    }
    const TOL: f64 = 1e-9;
    let c0 = field.c0().unsigned_abs() as f64;
    for (k, v) in g.iter() {
        let dist = if k >= 0 {
            v.min(1.0 - v)
        } else {
            let q = c0.powi((-k) as i32);
            let x = v * q;
            // a denominator beyond 2^52 is indistinguishable in double precision
            if q > 4.5e15 {
                0.0
            } else {
                (x - x.round()).abs() / q
            }
        };
        if dist > TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Star discrepancy of the points `rho_n(theta(y))` over the sample.
///
/// Exact for `n = 1`; for `n >= 2` the maximum runs over anchored boxes with
/// corners on a uniform grid of at most 4096 cells.
pub fn equidistribution_check(field: &NumberField, ys: &[f64], n: usize) -> Result<f64> {
    if n == 0 || n > 8 {
        return Err(Error::InvalidInput("n must be between 1 and 8".into()));
    }
    if ys.is_empty() {
        return Err(Error::InvalidInput("no samples".into()));
    }
    let a = field.alpha();
    let pts: Vec<Vec<f64>> = ys
        .iter()
        .map(|&y| (0..n).map(|j| frac(y * a.powi(j as i32))).collect())
        .collect();
    if n == 1 {
        let mut x: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        x.sort_by(f64::total_cmp);
        let m = x.len() as f64;
        return Ok(x
            .iter()
            .enumerate()
            .map(|(i, &v)| ((i + 1) as f64 / m - v).max(v - i as f64 / m))
            .fold(0.0, f64::max));
    }
    let g = (4096f64.powf(1.0 / n as f64).floor() as usize).max(2);
    let cells = g.pow(n as u32);
    let mut hist = vec![0u64; cells];
    for p in &pts {
        let mut idx = 0;
        for &c in p.iter().rev() {
            idx = idx * g + ((c * g as f64) as usize).min(g - 1);
        }
        hist[idx] += 1;
    }
    // inclusive prefix sums along every axis
    let mut stride = 1;
    for _ in 0..n {
        for i in 0..cells {
            if (i / stride) % g != 0 {
                hist[i] += hist[i - stride];
            }
        }
        stride *= g;
    }
    let m = pts.len() as f64;
    let mut worst: f64 = 0.0;
    for (i, &count) in hist.iter().enumerate() {
        let mut vol = 1.0;
        let mut r = i;
        for _ in 0..n {
            vol *= ((r % g) + 1) as f64 / g as f64;
            r /= g;
        }
        worst = worst.max((count as f64 / m - vol).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refinement::BuiltinMask;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn golden() -> NumberField {
        NumberField::new(&[-1, -1]).unwrap()
    }

    #[test]
    fn theta_golden_window() {
        let g = theta(&golden(), 1.0, 0, 5).unwrap();
        let expect = [0.0, 0.618_034, 0.618_034, 0.236_068, 0.854_102, 0.090_170];
        for (v, e) in g.values().iter().zip(expect) {
            assert!((v - e).abs() < 1e-6);
        }
        let z = theta(&golden(), 0.0, -3, 3).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
        assert!(matches!(theta(&golden(), 1.0, 0, 60), Err(Error::Precision(_))));
    }

    #[test]
    fn theta_exact_agrees() {
        let f = golden();
        let a = theta(&f, 1.0, -10, 30).unwrap();
        let b = theta_exact(&f, &FieldElement::one(2), -10, 30).unwrap();
        for ((_, x), (_, y)) in a.iter().zip(b.iter()) {
            let d = (x - y).abs();
            assert!(d.min(1.0 - d) < 1e-8);
        }
        let far = theta_exact(&f, &FieldElement::one(2), 200, 205).unwrap();
        assert!(far.max_dist_to_zero() < 1e-40);
    }

    #[test]
    fn shift_matches_scaling() {
        let f = golden();
        let y = 0.731;
        let g = theta(&f, y, -5, 5).unwrap();
        let h = theta(&f, y * f.alpha(), -5, 5).unwrap();
        let s = g.shift(1).unwrap();
        assert_eq!((s.j_min(), s.j_max()), (-5, 4));
        for (j, v) in s.iter() {
            assert!((v - h.get(j).unwrap()).abs() < 1e-12);
        }
        assert_eq!(g.shift(0).unwrap(), g);
        let back = g.shift(2).unwrap().shift(-2).unwrap();
        for (j, v) in back.iter() {
            assert_eq!(v, g.get(j).unwrap());
        }
        assert_eq!(g.shift(11).unwrap_err(), Error::EmptyWindow);
    }

    #[test]
    fn solenoidal_representation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for b in BuiltinMask::all() {
            let m = b.build().unwrap();
            let (lo, hi) = m.exponent_range();
            for _ in 0..100 {
                let y: f64 = rng.random_range(-10.0..10.0);
                let g = theta(m.field(), y, lo, hi).unwrap();
                let a = eval_a(&m, &g).unwrap();
                assert!((a - m.eval_symbol(y).value).norm() < 1e-10, "{b} y = {y}");
            }
            let zero = SolenoidWindow::zeros(lo, hi).unwrap();
            assert!((eval_a(&m, &zero).unwrap() - m.symbol_at_zero()).norm() < 1e-15);
        }
    }

    #[test]
    fn boxcar_lift_at_half() {
        let m = BuiltinMask::Boxcar.build().unwrap();
        let g = SolenoidWindow::new(-2, vec![0.3, 0.9, 0.5, 0.1]).unwrap();
        assert!(eval_a(&m, &g).unwrap()[(0, 0)].norm() < 1e-15);
        let small = SolenoidWindow::new(1, vec![0.2]).unwrap();
        assert!(matches!(eval_a(&m, &small), Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn kernel_windows() {
        let f = golden();
        let zero = SolenoidWindow::zeros(-3, 3).unwrap();
        assert!(kernel_window_test(&f, &zero).unwrap());
        let mut v = vec![0.0; 7];
        v[2] = 0.5;
        let g = SolenoidWindow::new(-3, v.clone()).unwrap();
        assert!(!kernel_window_test(&f, &g).unwrap());
        let h = NumberField::new(&[-2, -2]).unwrap();
        assert!(kernel_window_test(&h, &g).unwrap());
        v[4] = 0.5;
        let g = SolenoidWindow::new(-3, v).unwrap();
        assert!(!kernel_window_test(&h, &g).unwrap());
        assert!(kernel_window_test(&h, &SolenoidWindow::zeros(0, 3).unwrap()).is_err());
    }

    #[test]
    fn discrepancy() {
        let f = golden();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ys: Vec<f64> = (0..10_000).map(|_| rng.random_range(0.0..1000.0)).collect();
        assert!(equidistribution_check(&f, &ys, 1).unwrap() < 0.05);
        let d2 = equidistribution_check(&f, &ys, 2).unwrap();
        assert!(d2 < 0.05, "{d2}");
        let two = NumberField::integer(2).unwrap();
        // (x, 2x mod 1) lies on two lines; the box [0, 1/4) x [0, 1/2) is off by 1/8
        assert!(equidistribution_check(&two, &ys, 2).unwrap() > 0.1);
    }
}
