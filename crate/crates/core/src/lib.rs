//! Rank-one operators on the finite Hilbert module `A^d` over `A = C^n`,
//! classification of rank-one preservers, and operator-valued semicircular
//! distributions over the resulting operator algebra.

pub mod algebra;
pub mod error;
pub mod free_prob;
mod linalg;
pub mod module;
pub mod preserver;
pub mod sample;

pub use algebra::{AlgebraState, ArithOp, Class, Element, Tolerance, DEFAULT_TOL};
pub use error::{Error, Result};
pub use module::{adjoint, finite_rank_expand, inner_product, is_coordinate_invertible, sum_thetas, theta, ModuleVector, OperatorMatrix};
pub use num_complex::Complex64;
