//! Nearly linear recurrence sequences with certified arithmetic.
//!
//! The numeric core is generic over [`Scalar`]: exact rationals, `f32`/`f64`
//! and the enclosure types all implement it.

pub mod algebraic;
pub mod arithmetic;
pub mod binet;
pub mod common_terms;
pub mod diophantine;
pub mod error;
pub mod exact;
pub mod scalar;
pub mod sequences;
pub mod spec_io;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type ExactRational = num_rational::BigRational;
pub type BigInt = num_bigint::BigInt;
pub use algebraic::AlgebraicNumber;
pub use arithmetic::{ComplexEnclosure, PrecisionPolicy, RealEnclosure, RoundingMode};
