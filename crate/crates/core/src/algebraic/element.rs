use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::exact::{self, RatMatrix};
use super::NumberField;
use crate::error::{Error, Result};

/// An element `sum q_i alpha^i` of `Q[alpha]` in the power basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coords: Vec<BigRational>,
}

impl FieldElement {
    pub fn new(coords: Vec<BigRational>) -> Self {
        FieldElement { coords }
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn zero(degree: usize) -> Self {
        Self::new(vec![BigRational::zero(); degree])
    }

    pub fn one(degree: usize) -> Self {
        Self::rational(degree, BigRational::one())
    }

    pub fn rational(degree: usize, q: BigRational) -> Self {
        let mut e = Self::zero(degree);
        e.coords[0] = q;
        e
    }

    /// Parses comma-separated coordinates, each an integer or `p/q`.
    pub fn parse(s: &str) -> Result<Self> {
        let coords = s
            .trim()
            .trim_matches('"')
            .split(',')
            .map(|t| parse_rational(t.trim()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coords))
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Integer coordinates, i.e. membership in `Z[alpha]`.
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|q| q.is_integer())
    }

    /// Least common multiple of the coordinate denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coords
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::new(self.coords.iter().map(|c| c * q).collect())
    }

    pub fn to_f64_coords(&self) -> Vec<f64> {
        self.coords.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

pub(crate) fn parse_rational(t: &str) -> Result<BigRational> {
    let err = || Error::Parse(format!("rational `{t}`"));
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(t.parse().map_err(|_| err())?)),
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, q) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{q}")?;
        }
        Ok(())
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        FieldElement::new(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        FieldElement::new(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::new(self.coords.iter().map(|a| -a).collect())
    }
}

impl NumberField {
    pub fn check_dim(&self, e: &FieldElement) -> Result<()> {
        if e.dim() != self.degree() {
            return Err(Error::InvalidInput(format!(
                "element has {} coordinates, field degree is {}",
                e.dim(),
                self.degree()
            )));
        }
        Ok(())
    }

    /// Reduces a polynomial in `alpha` of any degree modulo the minimal polynomial.
    pub(crate) fn reduce(&self, mut p: Vec<BigRational>) -> FieldElement {
        let d = self.degree();
        while p.len() > d {
            let top = p.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = p.len() - d;
            for (i, &c) in self.coeffs().iter().enumerate() {
                p[shift + i] -= &top * BigRational::from_integer(c.into());
            }
        }
        p.resize(d, BigRational::zero());
        FieldElement::new(p)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let d = self.degree();
        let mut p = vec![BigRational::zero(); 2 * d - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                p[i + j] += x * y;
            }
        }
        self.reduce(p)
    }

    pub fn alpha_element(&self) -> FieldElement {
        let mut p = vec![BigRational::zero(); 2];
        p[1] = BigRational::one();
        self.reduce(p)
    }

    /// `alpha^{-1} = -(alpha^{d-1} + c_{d-1} alpha^{d-2} + ... + c_1) / c_0`.
    pub fn alpha_inverse(&self) -> FieldElement {
        let d = self.degree();
        let c0 = BigRational::from_integer(self.c0().into());
        let mut coords = vec![BigRational::zero(); d];
        for i in 0..d {
            let c = if i + 1 < d {
                BigRational::from_integer(self.coeffs()[i + 1].into())
            } else {
                BigRational::one()
            };
            coords[i] = -c / &c0;
        }
        FieldElement::new(coords)
    }

    /// `alpha^j` for any integer `j`.
    pub fn alpha_power(&self, j: i64) -> FieldElement {
        let base = if j >= 0 { self.alpha_element() } else { self.alpha_inverse() };
        let mut result = FieldElement::one(self.degree());
        let mut b = base;
        let mut n = j.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                result = self.mul(&result, &b);
            }
            n >>= 1;
            if n > 0 {
                b = self.mul(&b, &b);
            }
        }
        result
    }

    /// Matrix of multiplication by `e` in the power basis (column `j` is `e alpha^j`).
    pub(crate) fn mult_matrix(&self, e: &FieldElement) -> RatMatrix {
        let d = self.degree();
        let mut m = vec![vec![BigRational::zero(); d]; d];
        let mut col = e.clone();
        let alpha = self.alpha_element();
        for j in 0..d {
            for i in 0..d {
                m[i][j] = col.coords[i].clone();
            }
            if j + 1 < d {
                col = self.mul(&col, &alpha);
            }
        }
        m
    }

    /// Exact trace, as the trace of the multiplication matrix.
    pub fn trace(&self, e: &FieldElement) -> Result<BigRational> {
        self.check_dim(e)?;
        Ok(exact::trace(&self.mult_matrix(e)))
    }

    /// Exact norm, as the determinant of the multiplication matrix.
    pub fn norm(&self, e: &FieldElement) -> Result<BigRational> {
        self.check_dim(e)?;
        Ok(exact::det(self.mult_matrix(e)))
    }

    /// Exact inverse; `None` for zero.
    pub fn inverse(&self, e: &FieldElement) -> Result<Option<FieldElement>> {
        self.check_dim(e)?;
        let d = self.degree();
        let mut rhs = vec![BigRational::zero(); d];
        rhs[0] = BigRational::one();
        Ok(exact::solve(self.mult_matrix(e), rhs).map(FieldElement::new))
    }

    /// `sigma_k(e)` for every root, in the field's root order.
    pub fn conjugates(&self, e: &FieldElement) -> Vec<Complex64> {
        let c = e.to_f64_coords();
        self.roots()
            .iter()
            .map(|&z| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &q| acc * z + q))
            .collect()
    }

    /// The real embedding `sigma_1(e)`.
    pub fn embed(&self, e: &FieldElement) -> f64 {
        self.conjugates(e)[0].re
    }
}
