use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::{poly, roots};
use crate::error::{Error, Result};

/// Internal working precision of the root refinement, in fractional bits.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// Conjugate moduli must clear the unit circle by this margin to certify PV.
pub const PV_MARGIN: f64 = 1e-9;

/// Largest supported field degree.
pub const MAX_DEGREE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PvStatus {
    Pv,
    NotPv,
    Indeterminate,
}

impl fmt::Display for PvStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PvStatus::Pv => "PV",
            PvStatus::NotPv => "not-PV",
            PvStatus::Indeterminate => "indeterminate",
        })
    }
}

/// The field `Q[alpha]` of a monic irreducible integer polynomial together
/// with certified approximations of all conjugates of `alpha`.
///
/// `roots[0]` is the conjugate of largest modulus (preferring a real one);
/// the rest follow in decreasing modulus with complex-conjugate pairs adjacent,
/// positive imaginary part first.
///
/// Degree one fields (`X - b`) are allowed only through [`NumberField::integer`]
/// and stand for integer dilations such as `alpha = 2`.
#[derive(Debug, Clone)]
pub struct NumberField {
    coeffs: Vec<i64>,
    roots: Vec<Complex64>,
    radii: Vec<f64>,
    pv_status: PvStatus,
    real_conjugates: usize,
    complex_pairs: usize,
    ring_index: Option<u64>,
}

/// Parses `"c0,c1,...,c_{d-1}"`; the leading coefficient 1 is implicit.
pub fn parse_poly(s: &str) -> Result<Vec<i64>> {
    let s = s.trim().trim_matches('"');
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("coefficient `{}`: {e}", t.trim())))
        })
        .collect()
}

impl NumberField {
    pub fn new(coeffs: &[i64]) -> Result<Self> {
        Self::with_precision(coeffs, DEFAULT_PRECISION_BITS)
    }

    pub fn with_precision(coeffs: &[i64], precision_bits: u32) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("polynomial has no coefficients".into()));
        }
        if coeffs.len() < 2 {
            return Err(Error::InvalidInput(
                "field degree must be at least 2 (use NumberField::integer for integer dilations)"
                    .into(),
            ));
        }
        if coeffs.len() > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(coeffs.len()));
        }
        if coeffs[0] == 0 {
            return Err(Error::Reducible { factor: vec![0, 1] });
        }
        if !poly::is_squarefree(coeffs) {
            return Err(Error::Degenerate);
        }
        let cert = roots::certified_roots(coeffs, precision_bits)?;
        if let Some(factor) = find_factor(coeffs, &cert.roots, &cert.radii) {
            return Err(Error::Reducible { factor });
        }
        Ok(Self::assemble(coeffs.to_vec(), cert.roots, cert.radii))
    }

    /// The degree one "field" of an integer dilation `b`, `|b| >= 2`.
    pub fn integer(b: i64) -> Result<Self> {
        if b.abs() < 2 {
            return Err(Error::InvalidInput(format!(
                "integer dilation must satisfy |b| >= 2, got {b}"
            )));
        }
        Ok(Self::assemble(
            vec![-b],
            vec![Complex64::new(b as f64, 0.0)],
            vec![0.0],
        ))
    }

    /// Builds the field from a polynomial string; a single coefficient `c0`
    /// denotes the integer dilation `-c0`.
    pub fn from_poly_str(s: &str, precision_bits: u32) -> Result<Self> {
        let c = parse_poly(s)?;
        if c.len() == 1 {
            Self::integer(-c[0])
        } else {
            Self::with_precision(&c, precision_bits)
        }
    }

    pub fn with_ring_index(mut self, b: u64) -> Self {
        self.ring_index = Some(b.max(1));
        self
    }

    fn assemble(coeffs: Vec<i64>, roots: Vec<Complex64>, radii: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..roots.len()).collect();
        let key = |i: usize| (roots[i].norm(), roots[i].im == 0.0);
        let dominant = order
            .iter()
            .copied()
            .max_by(|&a, &b| {
                let (ma, ra) = key(a);
                let (mb, rb) = key(b);
                // exact modulus ties between a real root and a pair go to the real one
                ma.total_cmp(&mb).then(ra.cmp(&rb)).then(b.cmp(&a))
            })
            .unwrap();
        order.retain(|&i| i != dominant);
        order.sort_by(|&a, &b| {
            roots[b]
                .norm()
                .total_cmp(&roots[a].norm())
                .then(roots[b].re.total_cmp(&roots[a].re))
                .then(roots[b].im.total_cmp(&roots[a].im))
        });
        order.insert(0, dominant);
        let roots: Vec<Complex64> = order.iter().map(|&i| roots[i]).collect();
        let radii: Vec<f64> = order.iter().map(|&i| radii[i]).collect();
        let real_conjugates = roots[1..].iter().filter(|z| z.im == 0.0).count();
        let complex_pairs = (roots.len() - 1 - real_conjugates) / 2;
        let mut field = NumberField {
            coeffs,
            roots,
            radii,
            pv_status: PvStatus::Indeterminate,
            real_conjugates,
            complex_pairs,
            ring_index: None,
        };
        field.pv_status = field.classify();
        field
    }

    fn classify(&self) -> PvStatus {
        let d = self.degree();
        if d < 2 {
            return PvStatus::NotPv;
        }
        if poly::divides_unity_power(&self.coeffs, 64) {
            return PvStatus::NotPv;
        }
        let outside: Vec<usize> = (0..d)
            .filter(|&k| self.roots[k].norm() - self.radii[k] > 1.0)
            .collect();
        if outside.len() >= 2 {
            return PvStatus::NotPv;
        }
        let near_circle =
            (0..d).any(|k| (self.roots[k].norm() - 1.0).abs() <= self.radii[k] + PV_MARGIN);
        if near_circle {
            return PvStatus::Indeterminate;
        }
        if (1..d).any(|k| self.roots[k].norm() > 1.0) {
            return PvStatus::NotPv;
        }
        if outside == [0] && self.roots[0].im == 0.0 {
            PvStatus::Pv
        } else if outside.is_empty() {
            // all conjugates strictly inside the unit disk is impossible for a
            // nonzero algebraic integer, so only precision loss lands here
            PvStatus::Indeterminate
        } else {
            PvStatus::NotPv
        }
    }

    /// `c_0, ..., c_{d-1}`.
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn pv_status(&self) -> PvStatus {
        self.pv_status
    }

    pub fn is_pv(&self) -> bool {
        self.pv_status == PvStatus::Pv
    }

    /// The real dilation `alpha = alpha_1`.
    pub fn alpha(&self) -> f64 {
        self.roots[0].re
    }

    /// Number of real conjugates among `alpha_2, ..., alpha_d`.
    pub fn real_conjugates(&self) -> usize {
        self.real_conjugates
    }

    /// Number of complex-conjugate pairs among `alpha_2, ..., alpha_d`.
    pub fn complex_pairs(&self) -> usize {
        self.complex_pairs
    }

    /// `B(alpha)` with `O_alpha ⊆ B(alpha)^{-1} Z[alpha]`; defaults to 1.
    pub fn ring_index(&self) -> u64 {
        self.ring_index.unwrap_or(1)
    }

    /// `max_{k >= 2} |alpha_k|`, or 0 for integer dilations.
    pub fn max_conjugate_modulus(&self) -> f64 {
        self.roots[1..].iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn discriminant(&self) -> BigInt {
        poly::discriminant(&self.coeffs)
    }

    pub(crate) fn c0(&self) -> i64 {
        self.coeffs[0]
    }
}

/// Searches for a monic integer factor of degree `<= d/2`.
///
/// Every monic factor over `Z` is the product of `X - alpha_i` over a subset of
/// the roots, so the candidates are enumerated by subsets. A subset whose
/// coefficient enclosures each contain an integer is confirmed or rejected by
/// exact division.
fn find_factor(coeffs: &[i64], roots: &[Complex64], radii: &[f64]) -> Option<Vec<i64>> {
    let d = coeffs.len();
    let full = poly::monic_full(coeffs);
    for mask in 1u32..(1 << d) {
        let k = mask.count_ones() as usize;
        if k > d / 2 {
            continue;
        }
        let members: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
        let mut prod = vec![Complex64::new(1.0, 0.0)];
        let mut upper = vec![1.0f64];
        let mut center = vec![1.0f64];
        for &i in &members {
            prod = mul_linear(&prod, roots[i]);
            upper = mul_linear_abs(&upper, roots[i].norm() + radii[i]);
            center = mul_linear_abs(&center, roots[i].norm());
        }
        let mut candidate = Vec::with_capacity(k);
        let mut ok = true;
        for j in 0..k {
            let err = (upper[j] - center[j]) + 1e-9 * upper[j].max(1.0);
            let c = prod[j];
            let nearest = c.re.round();
            if c.im.abs() > err || (c.re - nearest).abs() > err {
                ok = false;
                break;
            }
            match nearest.to_i64() {
                Some(v) => candidate.push(v),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let (_, rem) = poly::div_rem_monic(&full, &poly::monic_full(&candidate));
        if rem.iter().all(|c| c.is_zero()) {
            let mut factor = candidate;
            factor.push(1);
            return Some(factor);
        }
    }
    None
}

fn mul_linear(p: &[Complex64], root: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); p.len() + 1];
    for (i, &c) in p.iter().enumerate() {
        out[i + 1] += c;
        out[i] -= c * root;
    }
    out
}

fn mul_linear_abs(p: &[f64], m: f64) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + 1];
    for (i, &c) in p.iter().enumerate() {
        out[i + 1] += c;
        out[i] += c * m;
    }
    out
}
