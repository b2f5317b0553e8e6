//! Continued fractions, near-identity search and the constructive lemmas.

pub mod cf;
pub mod fluctuate;
pub mod near_identity;
pub mod shift;
pub mod trace;

pub use cf::{continued_fraction_enclosure, continued_fraction_rational, continued_fraction_with, ContinuedFraction};
pub use fluctuate::{build_zero_rich, construct_fluctuating_tail, Branch, FluctuatingTail, ZeroEvidence, ZeroRich};
pub use near_identity::{near_identity_search, near_identity_search_with, NearIdentity, SearchMethod};
pub use shift::{construct_gamma, construct_shift, GammaConstruction, ShiftConstruction};
pub use trace::{Check, CheckKind, Construction, ConstructionTrace, Stage};
