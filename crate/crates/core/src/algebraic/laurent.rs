use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use super::{FieldElement, NumberField};
use crate::error::{Error, Result};

/// A finitely supported integer map `j -> t(j)`, standing for
/// `sum_j t(j) alpha^j` in `Z[alpha, alpha^{-1}]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentTranslate {
    support: BTreeMap<i64, i64>,
}

impl LaurentTranslate {
    pub fn new(pairs: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut support = BTreeMap::new();
        for (j, c) in pairs {
            *support.entry(j).or_insert(0) += c;
        }
        support.retain(|_, c| *c != 0);
        LaurentTranslate { support }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `c alpha^j`.
    pub fn monomial(j: i64, c: i64) -> Self {
        Self::new([(j, c)])
    }

    /// Parses `"j:c;j:c;..."`; an empty string is the zero translate.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(Self::zero());
        }
        let mut pairs = Vec::new();
        for term in s.split(';') {
            let (j, c) = term
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("translate term `{term}` is not `j:c`")))?;
            let j = j.trim().parse::<i64>().map_err(|e| Error::Parse(format!("exponent `{j}`: {e}")))?;
            let c = c.trim().parse::<i64>().map_err(|e| Error::Parse(format!("coefficient `{c}`: {e}")))?;
            pairs.push((j, c));
        }
        Ok(Self::new(pairs))
    }

    pub fn support(&self) -> &BTreeMap<i64, i64> {
        &self.support
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    /// Smallest and largest exponent with a nonzero coefficient.
    pub fn exponent_range(&self) -> Option<(i64, i64)> {
        Some((*self.support.keys().next()?, *self.support.keys().next_back()?))
    }

    /// `sum_j |t(j)| |x|^j` for a real base `x`.
    pub fn abs_value(&self, x: f64) -> f64 {
        self.support
            .iter()
            .map(|(&j, &c)| (c as f64).abs() * x.abs().powi(j as i32))
            .sum()
    }

    /// `sum_j t(j) x^j`.
    pub fn value(&self, x: f64) -> f64 {
        self.support.iter().map(|(&j, &c)| c as f64 * x.powi(j as i32)).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.support.iter().chain(&other.support).map(|(&j, &c)| (j, c)))
    }
}

impl fmt::Display for LaurentTranslate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self.support.iter().map(|(j, c)| format!("{j}:{c}")).collect();
        f.write_str(&terms.join(";"))
    }
}

impl NumberField {
    /// The exact power-basis representative of the translate together with
    /// its real embedding at the dominant root.
    pub fn laurent_embed(&self, t: &LaurentTranslate) -> (FieldElement, f64) {
        let d = self.degree();
        let mut acc = FieldElement::zero(d);
        for (&j, &c) in t.support() {
            let term = self.alpha_power(j).scale(&BigRational::from_integer(c.into()));
            acc = &acc + &term;
        }
        (acc, t.value(self.alpha()))
    }
}
