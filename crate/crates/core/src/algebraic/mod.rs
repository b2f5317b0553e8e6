//! Polynomials, certified roots and algebraic numbers.

pub mod charpoly;
pub mod independence;
pub mod number;
pub mod poly;
pub mod roots;

pub use charpoly::{classify_roots, reduce_to_nlrs_charpoly, CharPoly, CharRoot, Reduction, RootSummary};
pub use independence::{multiplicative_independence, Independence, DEFAULT_EXPONENT_BOUND};
pub use number::{factor_over_q, is_irreducible, AlgebraicNumber, ModulusClass};
pub use poly::Poly;
pub use roots::IsolatedRoot;
