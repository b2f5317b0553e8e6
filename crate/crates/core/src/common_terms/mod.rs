//! Common terms `a_k = b_m` of two integer nlrs.

pub mod counterexample;
pub mod gap;
pub mod line;
pub mod matveev;
pub mod relation;
pub mod search;

pub use counterexample::{build_counterexample_pair, CounterexamplePair};
pub use gap::{certify_gaps, gap_constants, ChainStep, DominantData, GapCertificate, GapCheck, GapConstants};
pub use line::{rational_line_fit, rational_line_fit_with, LineFit};
pub use matveev::{matveev_constant, matveev_lower_bound, MatveevInput, MatveevReport};
pub use relation::{root_relation, RootRelation};
pub use search::{search_common, search_common_with, sort_pairs, PairVerification, SolutionPair, SolutionSet};
