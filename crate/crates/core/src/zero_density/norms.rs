use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebraic::{FieldElement, NumberField};
use crate::error::{Error, Result};
use crate::numeric::lsq_fit;
use crate::solenoid::dual_basis;

/// Largest number of form evaluations in [`count_norm_values`].
pub const MAX_EVALUATIONS: f64 = 1e8;

const ROUNDING_TOL: f64 = 1e-6;
const VERIFY_SAMPLES: usize = 1000;

/// `N(mu_1) = F(n) / denominator` for `(mu_1, ..., mu_d) = V^{-1} n`, with `F`
/// an integer form of degree `d` in `d` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormForm {
    degree: usize,
    /// `(exponents, coefficient)` with nonzero coefficients, exponents in
    /// descending lexicographic order.
    terms: Vec<(Vec<u32>, BigInt)>,
    denominator: BigInt,
}

impl NormForm {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[(Vec<u32>, BigInt)] {
        &self.terms
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// Coefficient of `prod n_i^{e_i}`.
    pub fn coefficient(&self, exponents: &[u32]) -> BigInt {
        self.terms
            .iter()
            .find(|(e, _)| e.as_slice() == exponents)
            .map(|(_, c)| c.clone())
            .unwrap_or_default()
    }

    /// `F(n)`.
    pub fn numerator_at(&self, n: &[i64]) -> BigInt {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(n)
                    .fold(c.clone(), |acc, (&k, &x)| acc * BigInt::from(x).pow(k))
            })
            .sum()
    }

    /// `F(n) / denominator`.
    pub fn value(&self, n: &[i64]) -> BigRational {
        BigRational::new(self.numerator_at(n), self.denominator.clone())
    }

    /// Coefficients of `F(n_1, n_2, 0, ..., 0)`: entry `j` multiplies
    /// `n_1^{d-j} n_2^j`.
    pub fn binary_restriction(&self) -> Vec<BigInt> {
        let d = self.degree;
        (0..=d)
            .map(|j| {
                let mut e = vec![0u32; d];
                e[0] = (d - j) as u32;
                if d > 1 {
                    e[1] = j as u32;
                } else if j > 0 {
                    return BigInt::zero();
                }
                self.coefficient(&e)
            })
            .collect()
    }
}

impl fmt::Display for NormForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("n{}", i + 1) } else { format!("n{}^{k}", i + 1) })
                .collect();
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if idx == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag != BigInt::from(1) || mono.is_empty() {
                write!(f, "{mag}")?;
                if !mono.is_empty() {
                    f.write_str("*")?;
                }
            }
            f.write_str(&mono.join("*"))?;
        }
        write!(f, ")/{}", self.denominator)
    }
}

/// All exponent vectors of total degree `d` in `d` variables, descending.
fn monomials(d: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, vars: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if vars == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k);
            rec(left - k, vars - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d as u32, d, &mut Vec::new(), &mut out);
    out
}

/// Expands `prod_k (row_k(V^{-1}) . n)`, scales by `|disc P|`, rounds to
/// integers and reduces. The result is confirmed exactly against the norm of
/// `sum_i n_i q_i` (trace-dual basis `q_i`) on random integer vectors.
pub fn norm_form(field: &NumberField) -> Result<NormForm> {
    norm_form_seeded(field, 0x5eed)
}

pub fn norm_form_seeded(field: &NumberField, seed: u64) -> Result<NormForm> {
    let d = field.degree();
    let mats = field.matrices()?;
    // polynomial as dense map over the monomial list of each partial degree
    let mut poly: Vec<(Vec<u32>, Complex64)> = vec![(vec![0; d], Complex64::new(1.0, 0.0))];
    for k in 0..d {
        let mut next: Vec<(Vec<u32>, Complex64)> = Vec::new();
        for (e, c) in &poly {
            for i in 0..d {
                let mut e2 = e.clone();
                e2[i] += 1;
                let add = c * mats.v_inv()[(k, i)];
                match next.iter_mut().find(|(f, _)| *f == e2) {
                    Some(slot) => slot.1 += add,
                    None => next.push((e2, add)),
                }
            }
        }
        poly = next;
    }
    let disc = field.discriminant().abs();
    let disc_f = disc.to_f64().unwrap_or(f64::INFINITY);
    let mut terms = Vec::new();
    let mut worst: f64 = 0.0;
    for e in monomials(d) {
        let c = poly
            .iter()
            .find(|(f, _)| *f == e)
            .map(|p| p.1)
            .unwrap_or_default()
            * disc_f;
        let r = c.re.round();
        worst = worst.max((c.re - r).abs()).max(c.im.abs());
        if r != 0.0 {
            terms.push((e, BigInt::from(r as i128)));
        }
    }
    if worst > ROUNDING_TOL {
        return Err(Error::Precision(format!("norm form coefficients off integers by {worst:e}")));
    }
    let g = terms.iter().fold(disc.clone(), |acc, (_, c)| acc.gcd(c));
    let g = if g.is_zero() { BigInt::from(1) } else { g };
    let form = NormForm {
        degree: d,
        terms: terms.into_iter().map(|(e, c)| (e, c / &g)).collect(),
        denominator: disc / &g,
    };
    let dual = dual_basis(field)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..VERIFY_SAMPLES {
        let n: Vec<i64> = (0..d).map(|_| rng.random_range(-50..=50)).collect();
        if !form_matches_norm(field, &dual, &form, &n)? {
            return Err(Error::Precision(format!("norm form disagrees with the exact norm at {n:?}")));
        }
    }
    Ok(form)
}

/// `F(n) / den == N(sum_i n_i q_i)` exactly.
pub(crate) fn form_matches_norm(
    field: &NumberField,
    dual: &[FieldElement],
    form: &NormForm,
    n: &[i64],
) -> Result<bool> {
    let d = field.degree();
    let mut lam = FieldElement::zero(d);
    for (q, &x) in dual.iter().zip(n) {
        lam = &lam + &q.scale(&BigRational::from_integer(x.into()));
    }
    Ok(field.norm(&lam)? == form.value(n))
}

/// Distinct values of `|F(n_1, n_2, 0, ..., 0)|` in `[1, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormCount {
    pub l: u64,
    pub box_size: i64,
    pub count: usize,
    /// `(L / 2^k, count)` for `k = 7, ..., 0`.
    pub checkpoints: Vec<(u64, usize)>,
    /// Least-squares slope of `ln count` against `ln L` over the checkpoints.
    pub exponent: f64,
}

/// `ceil((L denominator)^{1/d}) + 2`.
pub fn default_box(form: &NormForm, l: u64) -> i64 {
    let den = form.denominator().to_f64().unwrap_or(1.0);
    ((l as f64 * den).powf(1.0 / form.degree() as f64)).ceil() as i64 + 2
}

/// Counts the distinct `|F|` values in `[1, L]` over `[-box, box]^2` in the
/// first two variables, the remaining variables set to 0.
pub fn count_norm_values(form: &NormForm, l: u64, box_size: Option<i64>) -> Result<NormCount> {
    if l == 0 {
        return Err(Error::InvalidInput("L must be positive".into()));
    }
    let b = box_size.unwrap_or_else(|| default_box(form, l));
    if b < 0 {
        return Err(Error::InvalidInput("box must be nonnegative".into()));
    }
    let side = (2 * b + 1) as f64;
    if side * side > MAX_EVALUATIONS {
        return Err(Error::Size { forecast: side * side, limit: MAX_EVALUATIONS });
    }
    let coeffs: Vec<i128> = form
        .binary_restriction()
        .iter()
        .map(|c| c.to_i128().ok_or_else(|| Error::InvalidInput("form coefficient too large".into())))
        .collect::<Result<_>>()?;
    let d = form.degree() as u32;
    let words = (l as usize >> 6) + 1;
    let rows: Vec<Vec<u64>> = (-b..=b)
        .into_par_iter()
        .map(|n1| {
            let mut hits = Vec::new();
            for n2 in -b..=b {
                if let Some(v) = eval_binary(&coeffs, d, n1, n2) {
                    let v = v.unsigned_abs();
                    if v >= 1 && v <= l as u128 {
                        hits.push(v as u64);
                    }
                }
            }
            hits
        })
        .collect();
    let mut seen = vec![0u64; words];
    for v in rows.into_iter().flatten() {
        seen[(v >> 6) as usize] |= 1 << (v & 63);
    }
    let count_upto = |t: u64| -> usize {
        let full = (t >> 6) as usize;
        let mut c: usize = seen[..full].iter().map(|w| w.count_ones() as usize).sum();
        let rem = t & 63;
        let mask = if rem == 63 { u64::MAX } else { (1u64 << (rem + 1)) - 1 };
        c += (seen[full] & mask).count_ones() as usize;
        c
    };
    let checkpoints: Vec<(u64, usize)> = (0..8)
        .rev()
        .map(|k| l >> k)
        .filter(|&t| t >= 1)
        .map(|t| (t, count_upto(t)))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = checkpoints
        .iter()
        .filter(|c| c.1 > 0)
        .map(|&(t, c)| ((t as f64).ln(), (c as f64).ln()))
        .unzip();
    let exponent = lsq_fit(&xs, &ys).map(|f| f.0).unwrap_or(f64::NAN);
    Ok(NormCount { l, box_size: b, count: count_upto(l), checkpoints, exponent })
}

fn eval_binary(c: &[i128], d: u32, n1: i64, n2: i64) -> Option<i128> {
    let (x, y) = (n1 as i128, n2 as i128);
    let mut acc: i128 = 0;
    for (j, &cj) in c.iter().enumerate() {
        if cj == 0 {
            continue;
        }
        let t = cj
            .checked_mul(x.checked_pow(d - j as u32)?)?
            .checked_mul(y.checked_pow(j as u32)?)?;
        acc = acc.checked_add(t)?;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_form() {
        let f = NumberField::new(&[-1, -1]).unwrap();
        let form = norm_form(&f).unwrap();
        assert_eq!(form.denominator(), &BigInt::from(5));
        assert_eq!(form.coefficient(&[2, 0]), BigInt::from(1));
        assert_eq!(form.coefficient(&[1, 1]), BigInt::from(1));
        assert_eq!(form.coefficient(&[0, 2]), BigInt::from(-1));
        assert_eq!(form.to_string(), "(n1^2 + n1*n2 - n2^2)/5");
        assert_eq!(form.value(&[1, 0]), BigRational::new(1.into(), 5.into()));
    }

    #[test]
    fn plastic_form() {
        let f = NumberField::new(&[-1, -1, 0]).unwrap();
        let form = norm_form(&f).unwrap();
        assert_eq!(form.denominator(), &BigInt::from(23));
        let expect = [
            ([3, 0, 0], 1),
            ([2, 1, 0], 2),
            ([1, 2, 0], 1),
            ([0, 3, 0], 1),
            ([1, 1, 1], -3),
            ([1, 0, 2], -1),
            ([0, 2, 1], -1),
            ([0, 0, 3], 1),
        ];
        for (e, c) in expect {
            assert_eq!(form.coefficient(&e), BigInt::from(c), "{e:?}");
        }
        assert_eq!(form.terms().len(), expect.len());
    }

    #[test]
    fn denominators_divide_discriminant() {
        for c in [vec![-1, -1], vec![-2, -2], vec![-1, -1, 0], vec![-8, -2, -1], vec![-1, 0, 0, -1]] {
            let f = NumberField::new(&c).unwrap();
            let form = norm_form(&f).unwrap();
            assert!((f.discriminant() % form.denominator()).is_zero(), "{c:?}");
        }
    }

    #[test]
    fn golden_counts() {
        let f = NumberField::new(&[-1, -1]).unwrap();
        let form = norm_form(&f).unwrap();
        let one = count_norm_values(&form, 1, None).unwrap();
        assert_eq!(one.count, 1);
        let c = count_norm_values(&form, 1000, None).unwrap();
        assert_eq!(c.count, 218);
        let bigger = count_norm_values(&form, 1000, Some(c.box_size + 10)).unwrap();
        assert!(bigger.count >= c.count);
        assert!(c.checkpoints.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn size_limit() {
        let f = NumberField::new(&[-1, -1]).unwrap();
        let form = norm_form(&f).unwrap();
        assert!(matches!(count_norm_values(&form, 10, Some(6000)), Err(Error::Size { .. })));
    }
}
