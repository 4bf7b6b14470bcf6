//! Integer and rational polynomial helpers. Coefficient vectors are stored
//! low degree first.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::exact;

/// Full coefficient vector `c_0, ..., c_{d-1}, 1` of the monic polynomial.
pub(crate) fn monic_full(coeffs: &[i64]) -> Vec<BigInt> {
    let mut p: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
    p.push(BigInt::one());
    p
}

pub(crate) fn to_rational(p: &[BigInt]) -> Vec<BigRational> {
    p.iter().cloned().map(BigRational::from_integer).collect()
}

pub(crate) fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

fn trim<T: Zero>(p: &mut Vec<T>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn rem_rational(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let q = r.last().unwrap().clone() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &q * c;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Greatest common divisor over Q, normalised to be monic.
pub(crate) fn gcd_rational(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem_rational(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in x.iter_mut() {
            *c /= &lead;
        }
    }
    x
}

/// Quotient and remainder of `a` by the monic integer polynomial `b`.
pub(crate) fn div_rem_monic(a: &[BigInt], b: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let db = b.len() - 1;
    debug_assert!(b[db].is_one());
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let lead = r.last().unwrap().clone();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &lead * c;
        }
        q[shift] = lead;
        r.pop();
        trim(&mut r);
    }
    (q, r)
}

pub(crate) fn is_squarefree(coeffs: &[i64]) -> bool {
    let p = monic_full(coeffs);
    let g = gcd_rational(&to_rational(&p), &to_rational(&derivative(&p)));
    g.len() <= 1
}

/// Discriminant of the monic polynomial, `(-1)^{d(d-1)/2} Res(P, P')`.
pub(crate) fn discriminant(coeffs: &[i64]) -> BigInt {
    let p = monic_full(coeffs);
    let d = p.len() - 1;
    if d == 1 {
        return BigInt::one();
    }
    let dp = derivative(&p);
    let n = 2 * d - 1;
    let mut syl = vec![vec![BigRational::zero(); n]; n];
    // d-1 shifted copies of P, then d shifted copies of P', highest degree first.
    for row in 0..d - 1 {
        for (k, c) in p.iter().rev().enumerate() {
            syl[row][row + k] = BigRational::from_integer(c.clone());
        }
    }
    for row in 0..d {
        for (k, c) in dp.iter().rev().enumerate() {
            syl[d - 1 + row][row + k] = BigRational::from_integer(c.clone());
        }
    }
    let res = exact::det(syl);
    let sign = if (d * (d - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    res.to_integer() * BigInt::from(sign)
}

/// True when `P` divides `X^n - 1` for some `n <= max_n`.
pub(crate) fn divides_unity_power(coeffs: &[i64], max_n: usize) -> bool {
    let p = monic_full(coeffs);
    let d = p.len() - 1;
    // x holds X^n mod P.
    let mut x = vec![BigInt::zero(); d];
    if d == 0 {
        return false;
    }
    x[0] = BigInt::one();
    for _ in 1..=max_n {
        // multiply by X
        let top = x[d - 1].clone();
        for i in (1..d).rev() {
            x[i] = x[i - 1].clone() - &top * &p[i];
        }
        x[0] = -(&top * &p[0]);
        if x[0].is_one() && x[1..].iter().all(|c| c.is_zero()) {
            return true;
        }
    }
    false
}

/// Synthetic division of a real polynomial by `X - root` in complex floats.
/// Returns the quotient, low degree first.
pub(crate) fn deflate_complex(
    p: &[f64],
    root: num_complex::Complex64,
) -> Vec<num_complex::Complex64> {
    let d = p.len() - 1;
    let mut q = vec![num_complex::Complex64::new(0.0, 0.0); d];
    let mut acc = num_complex::Complex64::new(p[d], 0.0);
    for i in (0..d).rev() {
        q[i] = acc;
        acc = acc * root + p[i];
    }
    q
}
