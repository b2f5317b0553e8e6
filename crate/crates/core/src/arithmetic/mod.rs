//! Certified real and complex interval arithmetic.

pub mod complex;
pub mod dyadic;
pub mod elementary;
pub mod expr;
pub mod policy;
pub mod real;
pub mod rounding;

pub use complex::{BoxJson, ComplexEnclosure};
pub use dyadic::{rational_to_decimal, Dyadic, Round};
pub use expr::{eval_enclosure, EvalOutcome, Expr};
pub use policy::PrecisionPolicy;
pub use real::{RealEnclosure, DEFAULT_PRECISION};
pub use rounding::{certified_round, certified_round_with, round_rational, RoundingMode};
