//! Refinable functions with Pisot (PV) dilations.
//!
//! The crate is organised in four layers:
//!
//! * [`algebraic`]: certified roots of monic integer polynomials, PV
//!   certification, exact trace/norm arithmetic in `Q[alpha]`, Laurent
//!   translates and the Vandermonde/companion/diagonal matrix trio.
//! * [`refinement`]: refinement masks, the Fourier symbol `â`, the truncated
//!   infinite product for `φ̂`, and the built-in example masks.
//! * [`solenoid`]: finite windows of `T^Z`, the map `theta`, the lifted symbol
//!   `A` with `â = A ∘ theta`, the neighbourhoods `U(m, eps)` and the lattice
//!   enumeration of `Y(L)`.
//! * [`zero_density`]: near-zero scanning, density estimates, vanishing probes
//!   and norm-form value counts.
//!
//! Every type is immutable after construction and every operation is pure, so
//! all of them may be shared across threads. Parallel kernels use `rayon` with
//! order-preserving collection, so results do not depend on the thread count.

pub mod algebraic;
pub mod error;
pub mod numeric;
pub mod refinement;
pub mod solenoid;
pub mod zero_density;

pub use algebraic::{
    dist_to_int, FieldElement, FieldMatrices, HomoclinicProfile, LaurentTranslate, NumberField,
    PvStatus, DEFAULT_PRECISION_BITS,
};
pub use error::{Error, Result};
pub use refinement::{BuiltinMask, PhiHatValue, RefinementMask, SymbolValue};
pub use solenoid::{LatticeCylinder, SolenoidWindow, UNeighborhood};
pub use zero_density::{NearZeroSet, NormForm, Verdict};



