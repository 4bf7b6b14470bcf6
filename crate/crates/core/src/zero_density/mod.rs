//! Near-zero sets of `â` and `φ̂`, their densities, vanishing probes along
//! dilation orbits, and norm-form value counts.

mod norms;

use std::fmt;

use rayon::prelude::*;

use crate::algebraic::FieldElement;
use crate::error::{Error, Result};
use crate::numeric::{golden_section_min, lsq_slope};
use crate::refinement::RefinementMask;

pub use norms::{count_norm_values, norm_form, NormCount, NormForm};

/// Width to which local minima are refined.
pub const REFINE_RESOLUTION: f64 = 1e-10;

/// Refined local minima of `|f|` below a threshold on `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NearZeroSet {
    pub delta: f64,
    pub l: f64,
    /// `(y, |f(y)|)`, sorted by `y`.
    pub points: Vec<(f64, f64)>,
}

impl NearZeroSet {
    pub fn locations(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Grid scan of `|f|` on `[0, L]`; grid local minima below `10 delta` are
/// refined by golden-section search and kept when the refined value is below
/// `delta`.
pub fn scan_near_zeros<F>(f: F, l: f64, grid_step: f64, delta: f64) -> Result<NearZeroSet>
where
    F: Fn(f64) -> f64 + Sync,
{
    if !(grid_step > 0.0) || !(delta > 0.0) || !(l >= 0.0) || !l.is_finite() {
        return Err(Error::InvalidInput("need grid_step > 0, delta > 0 and L >= 0".into()));
    }
    let n = (l / grid_step).floor() as usize;
    let mut ys: Vec<f64> = (0..=n).map(|i| i as f64 * grid_step).collect();
    if ys.last().is_some_and(|&y| y < l) {
        ys.push(l);
    }
    let vals: Vec<f64> = ys.par_iter().map(|&y| f(y)).collect();
    let last = ys.len() - 1;
    let candidates: Vec<usize> = (0..ys.len())
        .filter(|&i| {
            let v = vals[i];
            v < 10.0 * delta
                && (i == 0 || v <= vals[i - 1])
                && (i == last || v <= vals[i + 1])
        })
        .collect();
    let refined: Vec<(f64, f64)> = candidates
        .par_iter()
        .map(|&i| {
            let a = ys[i.saturating_sub(1)];
            let b = ys[(i + 1).min(last)];
            let (y, v) = golden_section_min(&f, a, b, REFINE_RESOLUTION);
            if v <= vals[i] {
                (y, v)
            } else {
                (ys[i], vals[i])
            }
        })
        .collect();
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (y, v) in refined.into_iter().filter(|p| p.1 < delta) {
        match points.last_mut() {
            Some(prev) if (y - prev.0).abs() < grid_step / 2.0 => {
                if v < prev.1 {
                    *prev = (y, v);
                }
            }
            _ => points.push((y, v)),
        }
    }
    points.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(NearZeroSet { delta, l, points })
}

/// `(min, max)` of `count([0, t]) / t` over `t = L/10, 2L/10, ..., L`.
pub fn density_estimate(z: &NearZeroSet) -> Result<(f64, f64)> {
    Ok(density_windows(z)?
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), w| (lo.min(w.2), hi.max(w.2))))
}

/// Rows `(t, count, density)` behind [`density_estimate`].
pub fn density_windows(z: &NearZeroSet) -> Result<Vec<(f64, usize, f64)>> {
    if z.l < 10.0 {
        return Err(Error::InvalidInput("density needs L >= 10".into()));
    }
    Ok((1..=10)
        .map(|k| {
            let t = k as f64 * z.l / 10.0;
            let c = z.points.iter().filter(|p| p.0 <= t).count();
            (t, c, c as f64 / t)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    TendsToZero,
    BoundedAway,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::TendsToZero => "tends-to-zero",
            Verdict::BoundedAway => "bounded-away",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// `|φ̂(lambda alpha^J)|` for `J = 0..=J_max` with its tail statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub lambda: FieldElement,
    pub values: Vec<(i64, f64)>,
    pub tail_mean: f64,
    pub tail_slope: f64,
    pub verdict: Verdict,
}

/// Threshold below which `|φ̂|` counts as zero: `1e-6` for truncated infinite
/// masks, `1e-8` otherwise.
pub fn default_delta(mask: &RefinementMask) -> f64 {
    if mask.generator().is_some() {
        1e-6
    } else {
        1e-8
    }
}

const FLAT_SLOPE: f64 = 1e-3;
const DECAY_SLOPE: f64 = -0.05;

/// Classifies the tail (last third of the `J` range): all values below
/// `delta`, or a least-squares slope of `ln |φ̂|` below `-0.05`, means
/// tends-to-zero; `|slope| < 1e-3` with level above `10 delta` means
/// bounded-away.
pub fn classify_tail(values: &[(i64, f64)], delta: f64) -> (f64, f64, Verdict) {
    let start = (2 * values.len() / 3).min(values.len().saturating_sub(2));
    let tail = &values[start..];
    let mean = tail.iter().map(|p| p.1).sum::<f64>() / tail.len() as f64;
    if tail.iter().all(|p| p.1 < delta) {
        return (mean, f64::NEG_INFINITY, Verdict::TendsToZero);
    }
    let xs: Vec<f64> = tail.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|p| p.1.max(f64::MIN_POSITIVE).ln()).collect();
    let slope = lsq_slope(&xs, &ys).unwrap_or(0.0);
    let verdict = if slope.abs() < FLAT_SLOPE && mean > 10.0 * delta {
        Verdict::BoundedAway
    } else if slope < DECAY_SLOPE {
        Verdict::TendsToZero
    } else {
        Verdict::Inconclusive
    };
    (mean, slope, verdict)
}

/// Probes whether `φ̂` vanishes along the orbits `lambda alpha^J`.
pub fn vanishing_probe(
    mask: &RefinementMask,
    lambdas: &[FieldElement],
    j_max: i64,
    tol: f64,
    delta: f64,
) -> Result<Vec<ProbeReport>> {
    if j_max < 2 {
        return Err(Error::InvalidInput("J_max must be at least 2".into()));
    }
    lambdas
        .iter()
        .map(|lam| {
            let orbit = mask.phihat_orbit_exact(lam, 0, j_max, tol)?;
            let values: Vec<(i64, f64)> = orbit.iter().map(|(j, v)| (*j, v.norm())).collect();
            let (tail_mean, tail_slope, verdict) = classify_tail(&values, delta);
            Ok(ProbeReport { lambda: lam.clone(), values, tail_mean, tail_slope, verdict })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refinement::BuiltinMask;

    #[test]
    fn boxcar_phihat_zeros() {
        let m = BuiltinMask::Boxcar.build().unwrap();
        let z = scan_near_zeros(|y| m.eval_phihat(y, 1e-13).unwrap().norm(), 8.0, 0.01, 1e-8).unwrap();
        let locs = z.locations();
        assert_eq!(locs.len(), 8, "{locs:?}");
        for (k, y) in locs.iter().enumerate() {
            assert!((y - (k + 1) as f64).abs() < 1e-8);
        }
    }

    #[test]
    fn boxcar_symbol_zeros() {
        let m = BuiltinMask::Boxcar.build().unwrap();
        let z = scan_near_zeros(|y| m.eval_symbol(y).scalar().norm(), 4.0, 0.01, 1e-8).unwrap();
        let locs = z.locations();
        assert_eq!(locs.len(), 4);
        for (k, y) in locs.iter().enumerate() {
            assert!((y - (k as f64 + 0.5)).abs() < 1e-8);
        }
    }

    #[test]
    fn dyadic_symbol_has_no_zeros() {
        let m = BuiltinMask::Dyadic.build().unwrap();
        let z = scan_near_zeros(|y| m.eval_symbol(y).scalar().norm(), 128.0, 0.01, 1e-3).unwrap();
        assert!(z.is_empty());
    }

    #[test]
    fn densities() {
        let m = BuiltinMask::Boxcar.build().unwrap();
        let phi = scan_near_zeros(|y| m.eval_phihat(y, 1e-13).unwrap().norm(), 100.0, 0.01, 1e-8).unwrap();
        let (lo, hi) = density_estimate(&phi).unwrap();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        let sym = scan_near_zeros(|y| m.eval_symbol(y).scalar().norm(), 100.0, 0.01, 1e-8).unwrap();
        let (slo, _) = density_estimate(&sym).unwrap();
        assert!((slo / lo - 1.0).abs() < 0.06);
        let empty = NearZeroSet { delta: 1e-8, l: 20.0, points: vec![] };
        assert_eq!(density_estimate(&empty).unwrap(), (0.0, 0.0));
        let short = NearZeroSet { delta: 1e-8, l: 5.0, points: vec![] };
        assert!(density_estimate(&short).is_err());
    }

    #[test]
    fn probe_verdicts() {
        let one = |d| FieldElement::one(d);
        let boxcar = BuiltinMask::Boxcar.build().unwrap();
        let r = vanishing_probe(&boxcar, &[one(1)], 40, 1e-13, 1e-8).unwrap();
        assert_eq!(r[0].verdict, Verdict::TendsToZero);
        let dyadic = BuiltinMask::Dyadic.build().unwrap();
        let r = vanishing_probe(&dyadic, &[one(1)], 40, 1e-13, 1e-6).unwrap();
        assert_eq!(r[0].verdict, Verdict::BoundedAway);
        assert!((r[0].tail_mean - 0.073_861_32).abs() < 1e-6, "{}", r[0].tail_mean);
        let bern = BuiltinMask::Bernoulli(vec![-1, -1]).build().unwrap();
        let r = vanishing_probe(&bern, &[one(2)], 40, 1e-13, 1e-8).unwrap();
        assert_eq!(r[0].verdict, Verdict::BoundedAway);
        assert!(r[0].tail_slope.abs() < 1e-3);
    }
}
