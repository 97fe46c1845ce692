#![cfg_attr(not(test), no_std)]

//! Regularity of SLE traces: closed-form exponent sets, a zipper-style Loewner
//! chain simulator and discrete seminorms of sampled paths.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches files,
//! threads or the command line lives in the `slereg` companion crate.
//!
//! * [`exponents`] - the exponents `q(r)`, `ζ(r)`, the admissible `r`-sets and the
//!   critical values `p*`, `α*`, together with a numerical optimizer used to
//!   cross-check them.
//! * [`intervals`] - finite unions of open intervals.
//! * [`loewner`] - driving functions, inverse slit-map composition, `f̂_t(iy)`
//!   and its derivative.
//! * [`regularity`] - p-variation, Hölder and Besov seminorms.

extern crate alloc;

pub mod error;
pub mod exponents;
pub mod intervals;
pub mod loewner;
mod math;
pub mod regularity;
pub mod rng;

pub use crate::error::{Error, Result};
pub use crate::exponents::Kappa;
pub use crate::intervals::{IntervalUnion, OpenInterval};
pub use crate::loewner::{DrivingPath, TracePath};
pub use crate::regularity::{SampledPath, SeminormKind, SeminormResult};
pub use num_complex::Complex64;
