//! Refinement masks, their Fourier symbol and the infinite product for `φ̂`.

mod bernoulli;
mod builtin;
mod parse;

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::algebraic::{FieldElement, LaurentTranslate, NumberField, OrbitPhases};
use crate::error::{Error, Result};
use crate::numeric::frac;

pub use bernoulli::{bernoulli_phihat, BernoulliValue};
pub use builtin::{BuiltinMask, BUILTIN_NAMES};
pub use parse::parse_mask_file;

/// Truncation tolerance for infinite masks.
pub const SYMBOL_TOL: f64 = 1e-14;

/// Factor budget of the truncated product.
pub const MAX_FACTORS: usize = 1_000_000;

const NORMALIZATION_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-8;

/// A closed-form coefficient sequence `k -> (a(k), tau(k))`, `k >= 1`, with
/// `||a(k)|| <= c rho^k`.
#[derive(Clone)]
pub struct Generator {
    pub name: String,
    pub c: f64,
    pub rho: f64,
    pub term: fn(usize) -> (DMatrix<Complex64>, LaurentTranslate),
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("name", &self.name)
            .field("c", &self.c)
            .field("rho", &self.rho)
            .finish()
    }
}

impl Generator {
    /// Number of terms `K` with `c rho^{K+1} / (1 - rho) < tol / 2`, and that tail.
    pub fn truncation(&self, tol: f64) -> Result<(usize, f64)> {
        if !(self.rho > 0.0 && self.rho < 1.0 && self.c > 0.0) {
            return Err(Error::InvalidInput(format!(
                "generator `{}` needs c > 0 and 0 < rho < 1",
                self.name
            )));
        }
        let tail = |k: usize| self.c * self.rho.powi(k as i32 + 1) / (1.0 - self.rho);
        let mut k = 1;
        while tail(k) >= tol / 2.0 {
            k += 1;
            if k > 100_000 {
                return Err(Error::Nonconvergence { factors: k });
            }
        }
        Ok((k, tail(k)))
    }
}

#[derive(Debug, Clone)]
struct Term {
    a: DMatrix<Complex64>,
    tau: LaurentTranslate,
    tau_real: f64,
}

/// `φ(x) = sum_k a(k) φ(alpha x - tau(k))` with `tau(k)` in `Z[alpha, alpha^{-1}]`.
#[derive(Debug, Clone)]
pub struct RefinementMask {
    name: String,
    field: NumberField,
    rank: usize,
    terms: Vec<Term>,
    generator: Option<Generator>,
    /// Bound on the symbol error from dropped terms.
    symbol_tail: f64,
    phihat0: DVector<Complex64>,
    lipschitz: f64,
}

/// `â(y)` with a bound on the error from dropped mask terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolValue {
    pub value: DMatrix<Complex64>,
    pub truncation_error: f64,
}

impl SymbolValue {
    pub fn scalar(&self) -> Complex64 {
        self.value[(0, 0)]
    }

    /// Smallest singular value of the symbol matrix.
    pub fn min_singular_value(&self) -> f64 {
        self.value
            .clone()
            .singular_values()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// `φ̂(y)` with a bound on the total truncation error.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiHatValue {
    pub value: DVector<Complex64>,
    pub truncation_error: f64,
    /// Number of symbol factors multiplied.
    pub factors: usize,
}

impl PhiHatValue {
    pub fn scalar(&self) -> Complex64 {
        self.value[0]
    }

    pub fn norm(&self) -> f64 {
        self.value.norm()
    }
}

fn cis(turns: f64) -> Complex64 {
    // exp(-2 pi i t) for a phase already reduced mod 1
    Complex64::from_polar(1.0, -2.0 * PI * turns)
}

impl RefinementMask {
    /// A finite mask. `phihat0` defaults to 1 for scalar masks and to the
    /// normalised eigenvector of `â(0)` for eigenvalue 1 otherwise.
    pub fn new(
        field: NumberField,
        coeffs: Vec<DMatrix<Complex64>>,
        translates: Vec<LaurentTranslate>,
        phihat0: Option<DVector<Complex64>>,
    ) -> Result<Self> {
        Self::build("custom".into(), field, coeffs, translates, None, 0.0, phihat0)
    }

    pub fn scalar(field: NumberField, coeffs: &[f64], translates: Vec<LaurentTranslate>) -> Result<Self> {
        let coeffs = coeffs
            .iter()
            .map(|&c| DMatrix::from_element(1, 1, Complex64::new(c, 0.0)))
            .collect();
        Self::new(field, coeffs, translates, None)
    }

    /// An infinite mask truncated so the dropped tail is below [`SYMBOL_TOL`].
    pub fn from_generator(
        field: NumberField,
        generator: Generator,
        phihat0: Option<DVector<Complex64>>,
    ) -> Result<Self> {
        let (k, tail) = generator.truncation(SYMBOL_TOL)?;
        let (coeffs, translates): (Vec<_>, Vec<_>) = (1..=k).map(generator.term).unzip();
        let name = generator.name.clone();
        Self::build(name, field, coeffs, translates, Some(generator), tail, phihat0)
    }

    pub(crate) fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    fn build(
        name: String,
        field: NumberField,
        coeffs: Vec<DMatrix<Complex64>>,
        translates: Vec<LaurentTranslate>,
        generator: Option<Generator>,
        coeff_tail: f64,
        phihat0: Option<DVector<Complex64>>,
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("mask has no coefficients".into()));
        }
        if coeffs.len() != translates.len() {
            return Err(Error::InvalidInput(format!(
                "{} coefficients but {} translates",
                coeffs.len(),
                translates.len()
            )));
        }
        let rank = coeffs[0].nrows();
        if rank == 0 || coeffs.iter().any(|a| a.nrows() != rank || a.ncols() != rank) {
            return Err(Error::InvalidInput("coefficients must be square matrices of one size".into()));
        }
        let alpha = field.alpha();
        let abs_alpha = alpha.abs();
        let terms: Vec<Term> = coeffs
            .into_iter()
            .zip(translates)
            .map(|(a, tau)| {
                let tau_real = tau.value(alpha);
                Term { a, tau, tau_real }
            })
            .collect();
        let lipschitz = 2.0 * PI / abs_alpha
            * terms.iter().map(|t| t.a.norm() * t.tau_real.abs()).sum::<f64>();
        let mut mask = RefinementMask {
            name,
            field,
            rank,
            terms,
            generator,
            symbol_tail: coeff_tail / abs_alpha,
            phihat0: DVector::from_element(rank, Complex64::new(1.0, 0.0)),
            lipschitz,
        };
        let a0 = mask.symbol_at_zero();
        if rank == 1 {
            let sum = mask.terms.iter().map(|t| t.a[(0, 0)]).sum::<Complex64>();
            if (sum - abs_alpha).norm() > NORMALIZATION_TOL + coeff_tail {
                return Err(Error::Normalization { sum: sum.re, expected: abs_alpha });
            }
            if let Some(v) = phihat0 {
                if v.len() != 1 || v[0].norm() == 0.0 {
                    return Err(Error::InvalidInput("scalar phihat0 must be one nonzero value".into()));
                }
                mask.phihat0 = v;
            }
        } else {
            mask.phihat0 = match phihat0 {
                Some(v) => {
                    if v.len() != rank || v.norm() == 0.0 {
                        return Err(Error::Eigen(format!("phihat0 must be a nonzero vector of length {rank}")));
                    }
                    let res = (&a0 * &v - &v).norm();
                    if res > 1e-10 * v.norm() {
                        return Err(Error::Eigen(format!("â(0) phihat0 differs from phihat0 by {res:e}")));
                    }
                    v
                }
                None => unit_eigenvector(&a0)?,
            };
        }
        Ok(mask)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_scalar(&self) -> bool {
        self.rank == 1
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: usize) -> &DMatrix<Complex64> {
        &self.terms[k].a
    }

    pub fn translate(&self, k: usize) -> &LaurentTranslate {
        &self.terms[k].tau
    }

    pub fn translates(&self) -> impl Iterator<Item = &LaurentTranslate> {
        self.terms.iter().map(|t| &t.tau)
    }

    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    pub fn phihat0(&self) -> &DVector<Complex64> {
        &self.phihat0
    }

    /// `2 pi |alpha|^{-1} sum ||a(k)|| |tau(k)|`, a Lipschitz constant of `â`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Error bound of every symbol evaluation.
    pub fn symbol_tail(&self) -> f64 {
        self.symbol_tail
    }

    /// Smallest and largest exponent over all translates.
    pub fn exponent_range(&self) -> (i64, i64) {
        self.terms
            .iter()
            .filter_map(|t| t.tau.exponent_range())
            .fold((0, 0), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)))
    }

    /// The symbol with term `k` carrying phase `phase(k)` (in turns).
    pub(crate) fn symbol_from_phases(&self, phase: impl Fn(usize, &LaurentTranslate) -> f64) -> DMatrix<Complex64> {
        let scale = 1.0 / self.field.alpha().abs();
        if self.rank == 1 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, t) in self.terms.iter().enumerate() {
                acc += t.a[(0, 0)] * cis(frac(phase(k, &t.tau)));
            }
            return DMatrix::from_element(1, 1, acc * scale);
        }
        let mut acc = DMatrix::zeros(self.rank, self.rank);
        for (k, t) in self.terms.iter().enumerate() {
            acc += &t.a * cis(frac(phase(k, &t.tau)));
        }
        acc * Complex64::new(scale, 0.0)
    }

    pub fn symbol_at_zero(&self) -> DMatrix<Complex64> {
        self.symbol_from_phases(|_, _| 0.0)
    }

    /// `â(y) = |alpha|^{-1} sum_k a(k) exp(-2 pi i tau(k) y)`.
    pub fn eval_symbol(&self, y: f64) -> SymbolValue {
        SymbolValue {
            value: self.symbol_from_phases(|k, _| self.terms[k].tau_real * y),
            truncation_error: self.symbol_tail,
        }
    }

    /// `â(lambda alpha^n)` with phases taken from an exact orbit.
    fn symbol_on_orbit(&self, reduced: &impl Fn(i64) -> f64, n: i64) -> DMatrix<Complex64> {
        self.symbol_from_phases(|_, tau| {
            tau.support()
                .iter()
                .map(|(&j, &c)| c as f64 * frac(reduced(n + j)))
                .sum()
        })
    }

    /// Number of factors `J0` with `lip |y| |alpha|^{-J0} / (|alpha| - 1) < tol`.
    fn factor_count(&self, y: f64, tol: f64) -> Result<(usize, f64)> {
        let a = self.field.alpha().abs();
        let head = self.lipschitz * y.abs() / (a - 1.0);
        if head < tol {
            return Ok((0, head));
        }
        let j0 = ((head / tol).ln() / a.ln()).ceil().max(0.0) as usize;
        let mut j0 = j0.saturating_sub(1);
        while head * a.powi(-(j0 as i32)) >= tol {
            j0 += 1;
            if j0 > MAX_FACTORS {
                return Err(Error::Nonconvergence { factors: j0 });
            }
        }
        Ok((j0, head * a.powi(-(j0 as i32))))
    }

    /// `φ̂(y) = (prod_{j <= -1} â(y alpha^j)) φ̂(0)`, truncated once the
    /// remaining factors are within `tol` of `â(0)`. Factors with more
    /// negative `j` act first.
    pub fn eval_phihat(&self, y: f64, tol: f64) -> Result<PhiHatValue> {
        if !(tol > 0.0) {
            return Err(Error::InvalidInput("tol must be positive".into()));
        }
        if !y.is_finite() {
            return Err(Error::InvalidInput("y must be finite".into()));
        }
        let (j0, tail) = self.factor_count(y, tol)?;
        let alpha = self.field.alpha();
        let mut h = DMatrix::<Complex64>::identity(self.rank, self.rank);
        for j in (1..=j0).rev() {
            let s = self.eval_symbol(y * alpha.powi(-(j as i32)));
            h = s.value * h;
        }
        let value = &h * &self.phihat0;
        let p0 = self.phihat0.norm();
        let hn = h.norm();
        let err = hn * tail.exp_m1() * p0 + j0 as f64 * self.symbol_tail * hn.max(1.0) * p0;
        Ok(PhiHatValue { value, truncation_error: err, factors: j0 })
    }

    /// `φ̂(lambda alpha^J)` for `J` in `j_min..=j_max`, built by repeated
    /// application of `φ̂(alpha y) = â(y) φ̂(y)` from a small starting argument.
    pub fn phihat_orbit(&self, lambda: f64, j_min: i64, j_max: i64, tol: f64) -> Result<Vec<(i64, PhiHatValue)>> {
        let alpha = self.field.alpha();
        self.orbit_with(lambda, j_min, j_max, tol, |j| self.eval_symbol(lambda * alpha.powi(j as i32)).value)
    }

    /// As [`phihat_orbit`](Self::phihat_orbit) for `lambda` in `Q[alpha]`,
    /// with every symbol phase taken modulo 1 from exact traces.
    pub fn phihat_orbit_exact(
        &self,
        lambda: &FieldElement,
        j_min: i64,
        j_max: i64,
        tol: f64,
    ) -> Result<Vec<(i64, PhiHatValue)>> {
        let lam = self.field.embed(lambda);
        let start = self.orbit_start(lam, j_min);
        let (lo, hi) = self.exponent_range();
        let n_min = start + lo;
        let n_max = j_max + hi;
        let orbit = OrbitPhases::new(&self.field, lambda, n_min, n_max)?;
        let reduced: Vec<f64> = (n_min..=n_max).map(|n| orbit.reduced(n)).collect();
        let lookup = |n: i64| reduced[(n - n_min) as usize];
        self.orbit_with(lam, j_min, j_max, tol, |j| self.symbol_on_orbit(&lookup, j))
    }

    fn orbit_start(&self, lambda: f64, j_min: i64) -> i64 {
        if lambda == 0.0 {
            return j_min;
        }
        // largest j with |lambda alpha^j| <= 1
        let a = self.field.alpha().abs();
        let j_star = (-(lambda.abs().ln()) / a.ln()).floor() as i64;
        j_min.min(j_star)
    }

    fn orbit_with(
        &self,
        lambda: f64,
        j_min: i64,
        j_max: i64,
        tol: f64,
        symbol: impl Fn(i64) -> DMatrix<Complex64>,
    ) -> Result<Vec<(i64, PhiHatValue)>> {
        if j_min > j_max {
            return Err(Error::InvalidInput("empty J range".into()));
        }
        let start = self.orbit_start(lambda, j_min);
        let y0 = lambda * self.field.alpha().powi(start as i32);
        let mut cur = self.eval_phihat(y0, tol)?;
        let mut out = Vec::with_capacity((j_max - j_min + 1) as usize);
        for j in start..=j_max {
            if j >= j_min {
                out.push((j, cur.clone()));
            }
            if j == j_max {
                break;
            }
            let s = symbol(j);
            let sn = s.norm();
            let value = &s * &cur.value;
            cur = PhiHatValue {
                truncation_error: sn * cur.truncation_error + self.symbol_tail * cur.value.norm(),
                value,
                factors: cur.factors + 1,
            };
        }
        Ok(out)
    }
}

/// Eigenvector of `m` for the eigenvalue 1, scaled so its largest entry is 1.
fn unit_eigenvector(m: &DMatrix<Complex64>) -> Result<DVector<Complex64>> {
    let n = m.nrows();
    let (_, t) = m.clone().schur().unpack();
    let near_one = (0..n).filter(|&i| (t[(i, i)] - 1.0).norm() < EIGEN_TOL).count();
    match near_one {
        0 => return Err(Error::Eigen("â(0) has no eigenvalue 1".into())),
        1 => {}
        k => return Err(Error::Eigen(format!("eigenvalue 1 of â(0) has multiplicity {k}"))),
    }
    let b = m - DMatrix::<Complex64>::identity(n, n);
    let svd = b.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Eigen("SVD failed".into()))?;
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let mut v: DVector<Complex64> = v_t.row(imin).transpose().map(|z| z.conj());
    let (kmax, _) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()).then(b.0.cmp(&a.0)))
        .unwrap();
    let pivot = v[kmax];
    v /= pivot;
    v[kmax] = Complex64::new(1.0, 0.0);
    Ok(v)
}
