//! Arithmetic in `Q[alpha]` for a root `alpha` of a monic integer polynomial.

mod element;
pub(crate) mod exact;
mod field;
mod laurent;
mod matrices;
mod orbit;
pub(crate) mod poly;
mod roots;

pub use element::FieldElement;
pub use field::{parse_poly, NumberField, PvStatus, DEFAULT_PRECISION_BITS, MAX_DEGREE, PV_MARGIN};
pub use laurent::LaurentTranslate;
pub use matrices::FieldMatrices;
pub use orbit::{
    homoclinic_profile, pisot_set_test, trace_power_sequence, HomoclinicProfile, OrbitPhases,
};

/// Distance from `x` to the nearest integer, in `[0, 1/2]`.
pub fn dist_to_int(x: f64) -> f64 {
    let r = x - x.round();
    r.abs()
}
