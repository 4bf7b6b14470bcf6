use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebraic::{FieldElement, NumberField, OrbitPhases, PvStatus};
use crate::error::{Error, Result};

/// `φ̂(alpha^J)` of the Bernoulli convolution, with the product cut at `j_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliValue {
    pub value: Complex64,
    /// Bound on the error from the dropped factors `j < j_min`.
    pub cutoff_error: f64,
}

/// `exp(-pi i alpha^J / (alpha - 1)) prod_{j_min <= j < J} cos(pi alpha^j)`.
///
/// Each `alpha^j` and `alpha^J / (alpha - 1)` enters only modulo 2, taken from
/// exact traces, so large `J` costs no accuracy.
pub fn bernoulli_phihat(field: &NumberField, big_j: i64, j_min: i64) -> Result<BernoulliValue> {
    if field.pv_status() != PvStatus::Pv {
        return Err(Error::NotPisot);
    }
    let d = field.degree();
    let mut shift = vec![0; d];
    shift[0] = -1;
    shift[1] = 1;
    let inv = field
        .inverse(&FieldElement::from_integers(&shift))?
        .ok_or_else(|| Error::InvalidInput("alpha - 1 is not invertible".into()))?;
    let phase = OrbitPhases::new(field, &inv, big_j, big_j)?.reduced_mod(big_j, 2);
    let mut value = Complex64::from_polar(1.0, -PI * phase);
    if big_j > j_min {
        let powers = OrbitPhases::new(field, &FieldElement::one(d), j_min, big_j - 1)?;
        for j in j_min..big_j {
            value *= (PI * powers.reduced_mod(j, 2)).cos();
        }
    }
    let a = field.alpha().abs();
    let first_dropped = PI * a.powi((j_min - 1) as i32);
    let cutoff_error = if first_dropped <= 1.0 {
        let s = PI * PI * a.powi(2 * j_min as i32) / (a * a - 1.0);
        value.norm() * s.exp_m1()
    } else {
        f64::INFINITY
    };
    Ok(BernoulliValue { value, cutoff_error })
}
