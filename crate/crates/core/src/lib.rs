//! Certified two-sided bounds for convex functions.
//!
//! A function is given as text in a small expression language
//! ([`expr`]). Each bound engine first certifies the convexity hypothesis it
//! needs ([`convexity`]) and then returns an enclosure `lower <= value <=
//! upper`, where the middle value comes from an independent reference
//! quadrature ([`quadrature`]):
//!
//! * [`hh`]: the Hermite-Hadamard sandwich and its refinements, the reflection
//!   gap, Riemann sums, the weighted (Fejer) upper bound and series-integral
//!   comparisons on `[0, inf)`;
//! * [`hardy`]: the Hardy ratio in weighted `L^p`, Holder products and product
//!   bounds for convex factors;
//! * [`deriv`]: bounds that use convexity of `f'` or `f''` (inflection split,
//!   first moment, trapezoid gap, mean-value enclosures, log-mean).
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below name the common double-precision instantiations.

// `!(x > 0)` style tests are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convexity;
pub mod deriv;
mod error;
pub mod expr;
pub mod function;
pub mod hardy;
pub mod hh;
pub mod quadrature;
pub mod random;
mod scalar;
mod settings;

pub use convexity::{certify, find_split, ConvexityCertificate, Interval, Verdict};
pub use error::{Error, Result};
pub use expr::{eval_jet, parse, Expression, Jet};
pub use function::{Domain, FunctionSpec, Provenance};
pub use hh::Enclosure;
pub use quadrature::QuadratureResult;
pub use scalar::Scalar;
pub use settings::Settings;

pub type Interval64 = Interval<f64>;
pub type Jet64 = Jet<f64>;
pub type Enclosure64 = Enclosure<f64>;
pub type FunctionSpec64 = FunctionSpec<f64>;
pub type Certificate64 = ConvexityCertificate<f64>;
pub type GapReport64 = deriv::GapReport<f64>;
pub type Settings64 = Settings<f64>;

pub type Interval32 = Interval<f32>;
pub type Jet32 = Jet<f32>;
pub type Enclosure32 = Enclosure<f32>;
pub type FunctionSpec32 = FunctionSpec<f32>;
