//! Operator-valued free probability over the operator matrices: non-crossing
//! combinatorics, semicircular moments, cumulants, conjugate variables and
//! free Fisher information.

mod cumulant;
mod fisher;
mod moments;
mod partition;

pub use cumulant::{cumulant, joint_moment, CumulantEngine, Letter, MomentWord, MAX_CUMULANT_ORDER};
pub use fisher::{
    fisher_information, verify_conjugate_variable, ConjugateCheck, ConjugateReport, FisherReport, OperatorTrace,
    MAX_CONJUGATE_ORDER,
};
pub use moments::{moment_pairing_oracle, semicircular_moment, SandwichCovariance, MAX_MOMENT_ORDER};
pub use partition::{catalan, enumerate_nc, NcKind, NonCrossingPartition, MAX_ENUMERATION};
