//! Spectral structure of the Cantor measures `μ_{q,b}`.
//!
//! The crate decides, certifies and refutes spectral properties of the
//! self-similar measures generated by `x ↦ x/b + i/q`, `0 ≤ i < q`, for
//! admissible pairs (`q ≥ 2`, `b/q` an integer `≥ 2`):
//!
//! * [`measure`]: certified evaluation of the filter `H_{q,b}`, its finite
//!   products and the Fourier transform `μ̂_{q,b}`, plus the constants
//!   `r0`, `r1`, `r2`.
//! * [`tree`]: words over `Σ_q`, tree mappings (finite tries and rule-based
//!   constructions), the projections `Π_{τ,n}` / `Π_{τ,∞}` and `Λ(τ)`.
//! * [`ortho`]: the zero set `Z_{q,b}`, digit expansions, orthogonality and
//!   the set → tree converse.
//! * [`gap`]: the gap quantity, its infimum over extensions, `N_τ(n)`, and
//!   the certify / refute engine producing [`Certificate`]s.
//! * [`frame`]: frame-function partial sums `Q_n` and the multi-channel
//!   filter identity.
//! * [`rescale`]: integer rescalings `KΛ` via repetends of `i/K`.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common instantiations. Integer data (branch sums, digit
//! expansions) is exact via `num-bigint`.

pub mod certificate;
pub mod error;
pub mod frame;
pub mod gap;
mod json;
pub mod measure;
pub mod ortho;
pub mod rescale;
pub mod tree;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumCast};

pub use certificate::{Certificate, Theorem, Verdict};
pub use error::{Error, Result};
pub use measure::MeasureParams;
pub use tree::{TreeMapping, Word};

/// Floating point type used by the numerical modules.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumCast + Debug + Display + Default + Sum + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into the working scalar type.
#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).unwrap_or_else(T::nan)
}

/// Exact rationals, used for repetend identities.
pub type Rational = num_rational::BigRational;

pub type CertifiedComplex64 = measure::CertifiedComplex<f64>;
pub type CertifiedComplex32 = measure::CertifiedComplex<f32>;
pub type Constants64 = measure::Constants<f64>;
pub type Constants32 = measure::Constants<f32>;
pub type FrameScanRow64 = frame::FrameScanRow<f64>;
pub type FrameScanRow32 = frame::FrameScanRow<f32>;
pub type DefectBound64 = gap::DefectBound;
