//! Rank-one preserving module maps: functional and vector factorization, the rank-one-sum
//! trichotomy, type detection, classification into canonical form and
//! the operator-level extension.

mod classify;
mod factor;
mod structured;
mod trichotomy;

pub use classify::{classify, detect_type, reconstruction_residual, PreserverType};
pub use factor::{extract_global_scalar, factor_functional, proportionality_factor};
pub use structured::{
    apply_structured, surjectivity_invertibility_check, BlackBoxPreserver, PreserverKind, StructuredPreserver,
    SurjectivityReport,
};
pub use trichotomy::{rank_one_sum_trichotomy, Beta, RankOneSum, TrichotomyCase, TrichotomyWitness};
