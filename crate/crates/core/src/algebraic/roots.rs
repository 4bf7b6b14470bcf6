//! Simultaneous root finding with certified error radii.
//!
//! Approximations come from the Aberth-Ehrlich iteration in double precision.
//! Each one is then polished by Newton's method on a dyadic grid with
//! `precision_bits` fractional bits, with `P` and `P'` evaluated exactly in
//! Gaussian-integer arithmetic. The radius attached to each root is the
//! inclusion radius `d |P(z_i)| / prod_{j != i} |z_i - z_j|` (Braess-Hadeler),
//! computed exactly in rationals, plus the distance to the reported `f64`
//! value. When the disks are pairwise disjoint each contains exactly one root.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub(crate) struct CertifiedRoots {
    pub roots: Vec<Complex64>,
    pub radii: Vec<f64>,
}

const MAX_PRECISION_BITS: u32 = 1024;
const RADIUS_LIMIT: f64 = 1e-9;

fn horner_f64(p: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let d = p.len() - 1;
    let mut val = Complex64::new(p[d], 0.0);
    let mut der = Complex64::new(0.0, 0.0);
    for i in (0..d).rev() {
        der = der * z + val;
        val = val * z + p[i];
    }
    (val, der)
}

/// Aberth-Ehrlich iteration for a monic real polynomial (coefficients low first).
pub(crate) fn aberth(p: &[f64], phase: f64) -> Option<Vec<Complex64>> {
    let d = p.len() - 1;
    if d == 1 {
        return Some(vec![Complex64::new(-p[0], 0.0)]);
    }
    let r = p[0].abs().powf(1.0 / d as f64).max(0.5);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / d as f64 + phase)
        })
        .collect();
    for _ in 0..5000 {
        let mut done = true;
        for i in 0..d {
            let (val, der) = horner_f64(p, z[i]);
            if val == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = val / der;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !w.is_finite() {
                return None;
            }
            z[i] -= w;
            if w.norm() > 1e-14 * z[i].norm().max(1.0) {
                done = false;
            }
        }
        if done {
            return Some(z);
        }
    }
    // Fall through with the last iterate; certification decides whether it is usable.
    Some(z)
}

/// A Gaussian integer read as `(re + i im) / 2^bits`.
#[derive(Clone, Debug)]
struct Dyadic {
    re: BigInt,
    im: BigInt,
}

fn cmul(a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    // d > 0
    let num: BigInt = n * 2 + d;
    num.div_floor(&(d * 2))
}

fn scaled_from_f64(x: f64, bits: u32) -> BigInt {
    let q = BigRational::from_float(x).expect("finite root approximation");
    let scaled = q * BigRational::from_integer(BigInt::one() << bits);
    round_div(scaled.numer(), scaled.denom())
}

/// `Σ c_i Z^i 2^{bits (deg - i)}`, i.e. the polynomial at `Z / 2^bits` times `2^{bits deg}`.
fn eval_scaled(c: &[BigInt], z: &Dyadic, bits: u32) -> (BigInt, BigInt) {
    let deg = c.len() - 1;
    let zz = (z.re.clone(), z.im.clone());
    let mut acc = (c[deg].clone(), BigInt::zero());
    for i in (0..deg).rev() {
        acc = cmul(&acc, &zz);
        acc.0 += &c[i] << (bits as usize * (deg - i));
    }
    acc
}

fn newton_polish(full: &[BigInt], deriv: &[BigInt], z: &mut Dyadic, bits: u32, real: bool) {
    for _ in 0..16 {
        let a = eval_scaled(full, z, bits);
        let b = eval_scaled(deriv, z, bits);
        let den = &b.0 * &b.0 + &b.1 * &b.1;
        if den.is_zero() {
            return;
        }
        // step * 2^bits = A / B
        let num_re = &a.0 * &b.0 + &a.1 * &b.1;
        let num_im = &a.1 * &b.0 - &a.0 * &b.1;
        let s_re = round_div(&num_re, &den);
        let s_im = if real { BigInt::zero() } else { round_div(&num_im, &den) };
        let small = s_re.abs() <= BigInt::one() && s_im.abs() <= BigInt::one();
        z.re -= s_re;
        z.im -= s_im;
        if small {
            return;
        }
    }
}

fn to_f64_scaled(x: &BigInt, bits: u32) -> f64 {
    BigRational::new(x.clone(), BigInt::one() << bits)
        .to_f64()
        .unwrap_or(f64::NAN)
}

fn certify(full: &[BigInt], zs: &[Dyadic], bits: u32) -> Option<CertifiedRoots> {
    let d = zs.len();
    let scale2 = BigInt::one() << (2 * bits as usize);
    let mut roots = Vec::with_capacity(d);
    let mut radii = Vec::with_capacity(d);
    for (i, zi) in zs.iter().enumerate() {
        let a = eval_scaled(full, zi, bits);
        let a2 = &a.0 * &a.0 + &a.1 * &a.1;
        let mut prod = BigInt::one();
        for (j, zj) in zs.iter().enumerate() {
            if i != j {
                let dr = &zi.re - &zj.re;
                let di = &zi.im - &zj.im;
                prod *= &dr * &dr + &di * &di;
            }
        }
        if prod.is_zero() {
            return None;
        }
        let w2 = BigRational::new(a2, prod * &scale2);
        let incl = (d as f64) * w2.to_f64()?.sqrt() * (1.0 + 1e-12);
        let re = to_f64_scaled(&zi.re, bits);
        let im = to_f64_scaled(&zi.im, bits);
        let exact_re = BigRational::new(zi.re.clone(), BigInt::one() << bits);
        let exact_im = BigRational::new(zi.im.clone(), BigInt::one() << bits);
        let err_re = (exact_re - BigRational::from_float(re)?).abs().to_f64()?;
        let err_im = (exact_im - BigRational::from_float(im)?).abs().to_f64()?;
        let rounding = (err_re + err_im) * (1.0 + 1e-12);
        roots.push(Complex64::new(re, im));
        radii.push(incl + rounding + f64::MIN_POSITIVE);
    }
    for i in 0..d {
        for j in i + 1..d {
            let dr = to_f64_scaled(&(&zs[i].re - &zs[j].re), bits);
            let di = to_f64_scaled(&(&zs[i].im - &zs[j].im), bits);
            if dr.hypot(di) * (1.0 - 1e-12) <= radii[i] + radii[j] {
                return None;
            }
        }
    }
    Some(CertifiedRoots { roots, radii })
}

/// Certified roots of the monic polynomial `X^d + c_{d-1} X^{d-1} + ... + c_0`.
pub(crate) fn certified_roots(coeffs: &[i64], precision_bits: u32) -> Result<CertifiedRoots> {
    let full: Vec<BigInt> = super::poly::monic_full(coeffs);
    let deriv = super::poly::derivative(&full);
    let pf: Vec<f64> = full.iter().map(|c| c.to_f64().unwrap()).collect();
    let mut bits = precision_bits.max(64);
    let mut last_err = String::from("root finder did not converge");
    while bits <= MAX_PRECISION_BITS {
        for attempt in 0..4 {
            let phase = 0.4 + 0.9 * attempt as f64;
            let Some(approx) = aberth(&pf, phase) else {
                continue;
            };
            let mut zs: Vec<Dyadic> = approx
                .iter()
                .map(|z| Dyadic {
                    re: scaled_from_f64(z.re, bits),
                    im: scaled_from_f64(z.im, bits),
                })
                .collect();
            let snap = BigInt::one() << (bits as usize / 2);
            for z in zs.iter_mut() {
                newton_polish(&full, &deriv, z, bits, false);
                let mag = z.re.abs().max(BigInt::one() << bits as usize);
                // |Im| below 2^{-bits/2} |z|: a real root approached off-axis.
                if z.im.abs() * &snap < mag {
                    z.im = BigInt::zero();
                    newton_polish(&full, &deriv, z, bits, true);
                }
            }
            if !symmetrize(&mut zs) {
                last_err = "complex roots do not pair into conjugates".into();
                continue;
            }
            match certify(&full, &zs, bits) {
                Some(c) if c.radii.iter().all(|&r| r < RADIUS_LIMIT) => return Ok(c),
                Some(_) => last_err = format!("root radii above {RADIUS_LIMIT:e} at {bits} bits"),
                None => last_err = format!("inclusion disks overlap at {bits} bits"),
            }
        }
        bits *= 2;
    }
    Err(Error::Precision(last_err))
}

/// Forces exact conjugate symmetry on the non-real roots of a real polynomial.
fn symmetrize(zs: &mut [Dyadic]) -> bool {
    let upper: Vec<usize> = (0..zs.len()).filter(|&i| zs[i].im.is_positive()).collect();
    let mut lower: Vec<usize> = (0..zs.len()).filter(|&i| zs[i].im.is_negative()).collect();
    if upper.len() != lower.len() {
        return false;
    }
    for &u in &upper {
        let (pos, _) = lower
            .iter()
            .enumerate()
            .map(|(pos, &l)| {
                let dr = &zs[u].re - &zs[l].re;
                let di = &zs[u].im + &zs[l].im;
                (pos, &dr * &dr + &di * &di)
            })
            .min_by(|a, b| a.1.cmp(&b.1))
            .unwrap();
        let l = lower.swap_remove(pos);
        zs[l].re = zs[u].re.clone();
        zs[l].im = -zs[u].im.clone();
    }
    true
}
