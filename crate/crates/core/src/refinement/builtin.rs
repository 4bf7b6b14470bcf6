use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Generator, RefinementMask};
use crate::algebraic::{parse_poly, LaurentTranslate, NumberField, PvStatus};
use crate::error::{Error, Result};

/// The worked example masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltinMask {
    /// `alpha = 2`, `a = (1, 1)`, `tau = (0, 1)`: the indicator of `[0, 1]`.
    Boxcar,
    /// `alpha = 2`, `a(k) = tau(k) = 2^{1-k}` for `k >= 1`.
    Dyadic,
    /// `a = (|alpha|/2, |alpha|/2)`, `tau = (0, 1)` for the PV number with the
    /// given minimal polynomial coefficients.
    Bernoulli(Vec<i64>),
    /// The rank-2 golden mean mask whose solution is
    /// `(chi_[0, 1/alpha], chi_[0, 1])`.
    GoldenVector,
}

pub const BUILTIN_NAMES: [&str; 4] = ["boxcar", "dyadic", "bernoulli", "golden_vector"];

fn scalar(c: f64) -> DMatrix<Complex64> {
    DMatrix::from_element(1, 1, Complex64::new(c, 0.0))
}

fn dyadic_term(k: usize) -> (DMatrix<Complex64>, LaurentTranslate) {
    let e = 1 - k as i64;
    (scalar(2f64.powi(e as i32)), LaurentTranslate::monomial(e, 1))
}

impl BuiltinMask {
    pub fn all() -> Vec<BuiltinMask> {
        vec![
            BuiltinMask::Boxcar,
            BuiltinMask::Dyadic,
            BuiltinMask::Bernoulli(vec![-1, -1]),
            BuiltinMask::GoldenVector,
        ]
    }

    pub fn build(&self) -> Result<RefinementMask> {
        self.build_with_precision(crate::algebraic::DEFAULT_PRECISION_BITS)
    }

    pub fn build_with_precision(&self, precision_bits: u32) -> Result<RefinementMask> {
        let unit = || LaurentTranslate::monomial(0, 1);
        let mask = match self {
            BuiltinMask::Boxcar => RefinementMask::scalar(
                NumberField::integer(2)?,
                &[1.0, 1.0],
                vec![LaurentTranslate::zero(), unit()],
            )?,
            BuiltinMask::Dyadic => RefinementMask::from_generator(
                NumberField::integer(2)?,
                Generator { name: "dyadic".into(), c: 2.0, rho: 0.5, term: dyadic_term },
                None,
            )?,
            BuiltinMask::Bernoulli(coeffs) => {
                let field = NumberField::with_precision(coeffs, precision_bits)?;
                if field.pv_status() != PvStatus::Pv {
                    return Err(Error::NotPisot);
                }
                let h = field.alpha().abs() / 2.0;
                RefinementMask::scalar(field, &[h, h], vec![LaurentTranslate::zero(), unit()])?
            }
            BuiltinMask::GoldenVector => {
                let field = NumberField::with_precision(&[-1, -1], precision_bits)?;
                let c = |v: [f64; 4]| {
                    DMatrix::from_row_slice(2, 2, &v.map(|x| Complex64::new(x, 0.0)))
                };
                RefinementMask::new(
                    field,
                    vec![c([0.0, 1.0, 0.0, 1.0]), c([0.0, 0.0, 1.0, 0.0])],
                    vec![LaurentTranslate::zero(), unit()],
                    None,
                )?
            }
        };
        Ok(mask.with_name(&self.to_string()))
    }
}

impl fmt::Display for BuiltinMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinMask::Boxcar => f.write_str("boxcar"),
            BuiltinMask::Dyadic => f.write_str("dyadic"),
            BuiltinMask::Bernoulli(c) if c == &[-1, -1] => f.write_str("bernoulli"),
            BuiltinMask::Bernoulli(c) => {
                let c: Vec<String> = c.iter().map(i64::to_string).collect();
                write!(f, "bernoulli({})", c.join(","))
            }
            BuiltinMask::GoldenVector => f.write_str("golden_vector"),
        }
    }
}

impl FromStr for BuiltinMask {
    type Err = Error;

    /// Accepts `boxcar`, `dyadic`, `golden_vector`, `bernoulli` (golden mean)
    /// and `bernoulli(c0,...,c_{d-1})`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase().replace('-', "_");
        match t.as_str() {
            "boxcar" => return Ok(BuiltinMask::Boxcar),
            "dyadic" => return Ok(BuiltinMask::Dyadic),
            "golden_vector" | "golden" => return Ok(BuiltinMask::GoldenVector),
            "bernoulli" => return Ok(BuiltinMask::Bernoulli(vec![-1, -1])),
            _ => {}
        }
        // keep the original string here: coefficients may be negative
        let raw = s.trim();
        if let Some(inner) = raw
            .strip_prefix("bernoulli(")
            .and_then(|r| r.strip_suffix(')'))
        {
            return Ok(BuiltinMask::Bernoulli(parse_poly(inner)?));
        }
        Err(Error::UnknownExample(s.to_string()))
    }
}
