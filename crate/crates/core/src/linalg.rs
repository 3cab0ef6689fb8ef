//! Pointwise complex linear algebra helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::algebra::Tolerance;

pub(crate) type CMatrix = DMatrix<Complex64>;
pub(crate) type CVector = DVector<Complex64>;

pub(crate) fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Number of singular values above `tol * max(1, sigma_max)`.
pub(crate) fn numerical_rank(m: &CMatrix, tol: Tolerance) -> usize {
    let sv = singular_values(m);
    let top = sv.iter().copied().fold(0.0, f64::max);
    let thr = tol.threshold(top);
    sv.iter().filter(|&&s| s > thr).count()
}

/// Rank-one factorization `m = u v^H` through the column of largest norm:
/// `u` is that column and `v^H = u^H m / |u|^2`. Exact when `m` has rank one.
pub(crate) fn rank_one_factor(m: &CMatrix) -> (CVector, CVector) {
    let k = (0..m.ncols())
        .map(|j| (j, m.column(j).norm()))
        .fold((0, f64::NEG_INFINITY), |best, (j, s)| if s > best.1 { (j, s) } else { best })
        .0;
    let u: CVector = m.column(k).into_owned();
    let norm2 = u.norm_squared();
    let v = if norm2 > 0.0 { m.adjoint() * &u / Complex64::new(norm2, 0.0) } else { CVector::zeros(m.ncols()) };
    (u, v)
}

/// Condition number `sigma_max / sigma_min` (infinite when singular).
pub(crate) fn condition_number(m: &CMatrix) -> f64 {
    let sv = singular_values(m);
    let top = sv.iter().copied().fold(0.0, f64::max);
    let bottom = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if bottom == 0.0 {
        f64::INFINITY
    } else {
        top / bottom
    }
}

/// Full column rank as a linear map.
pub(crate) fn is_injective(m: &CMatrix, tol: Tolerance) -> bool {
    numerical_rank(m, tol) == m.ncols()
}

/// Projection coefficient `a` minimising `|target - a * base|`, with the
/// residual. `base` must be nonzero.
pub(crate) fn proportional_coefficient(base: &CVector, target: &CVector) -> (Complex64, f64) {
    let base_norm = base.norm();
    let a = base.dotc(target) / (base_norm * base_norm);
    let residual = (target - base.map(|z| z * a)).norm();
    (a, residual)
}
