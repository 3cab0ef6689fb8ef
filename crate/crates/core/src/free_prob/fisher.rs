//! Conjugate variables and free Fisher information for a semicircular `X`
//! with sandwich covariance `b -> A b B`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraState, Tolerance};
use crate::error::{Error, Result};
use crate::free_prob::cumulant::{cumulant, joint_moment, Letter, MomentWord};
use crate::free_prob::moments::SandwichCovariance;
use crate::module::OperatorMatrix;
use crate::sample::Sampler;

/// Largest cumulant order [`verify_conjugate_variable`] will check.
pub const MAX_CONJUGATE_ORDER: usize = 6;

/// `tau(M) = (1/d) sum_i state(M_ii)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorTrace {
    pub state: AlgebraState,
}

impl OperatorTrace {
    pub fn new(state: AlgebraState) -> Self {
        OperatorTrace { state }
    }

    pub fn uniform(n: usize) -> Self {
        OperatorTrace { state: AlgebraState::uniform(n) }
    }

    pub fn apply(&self, m: &OperatorMatrix) -> Result<Complex64> {
        let d = m.dim();
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..d {
            sum += self.state.apply(&m.entry(i, i))?;
        }
        Ok(sum / d as f64)
    }
}

/// `A^-1 B^-1`, the coefficient of the conjugate variable `xi = X c`.
fn conjugate_coefficient(cov_phi: &SandwichCovariance, tol: Tolerance) -> Result<(OperatorMatrix, OperatorMatrix, OperatorMatrix)> {
    let a_inv = cov_phi.left.inverse(tol)?;
    let b_inv = cov_phi.right.inverse(tol)?;
    let c = a_inv.checked_mul(&b_inv)?;
    Ok((a_inv, b_inv, c))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateCheck {
    pub max_order: usize,
    /// Random coefficient draws per condition.
    pub batch: usize,
    pub seed: u64,
    pub tol: Tolerance,
}

impl Default for ConjugateCheck {
    fn default() -> Self {
        ConjugateCheck { max_order: 5, batch: 20, seed: 0, tol: Tolerance::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugateReport {
    pub max_order_checked: usize,
    /// `"k1"`, `"k2"`, ... mapped to the largest deviation seen at that order.
    pub condition_deviations: BTreeMap<String, f64>,
}

impl ConjugateReport {
    pub fn max_deviation(&self) -> f64 {
        self.condition_deviations.values().copied().fold(0.0, f64::max)
    }
}

/// Checks that `xi = X A^-1 B^-1` satisfies the conjugate relations for
/// `eta(b) = B^-1 b B`: `k1(xi) = 0`, `k2(xi, bX) = eta(b)` and all higher
/// mixed cumulants with leading `xi` vanish, up to `max_order`.
pub fn verify_conjugate_variable(cov_phi: &SandwichCovariance, check: ConjugateCheck) -> Result<ConjugateReport> {
    if check.max_order > MAX_CONJUGATE_ORDER {
        return Err(Error::SizeLimit { size: check.max_order, limit: MAX_CONJUGATE_ORDER });
    }
    let (d, n) = (cov_phi.dim(), cov_phi.spectrum_size());
    let (_, b_inv, c) = conjugate_coefficient(cov_phi, check.tol)?;
    let eta = SandwichCovariance::new(b_inv, cov_phi.right.clone())?;
    let mut rng = Sampler::new(check.seed);
    let mut deviations = BTreeMap::new();

    if check.max_order >= 1 {
        let k1 = cumulant(&MomentWord::new(vec![Letter::Xi], vec![], None)?, cov_phi, &c)?;
        deviations.insert("k1".to_string(), k1.max_abs());
    }
    if check.max_order >= 2 {
        let mut worst = 0.0f64;
        for _ in 0..check.batch {
            let b = rng.operator(d, n);
            let word = MomentWord::leading_xi(vec![b.clone()]);
            let k2 = cumulant(&word, cov_phi, &c)?;
            worst = worst.max(k2.distance(&eta.apply(&b)?));
        }
        deviations.insert("k2".to_string(), worst);
    }
    for order in 3..=check.max_order {
        let mut worst = 0.0f64;
        for _ in 0..check.batch {
            let bs = (1..order).map(|_| rng.operator(d, n)).collect();
            worst = worst.max(cumulant(&MomentWord::leading_xi(bs), cov_phi, &c)?.max_abs());
        }
        deviations.insert(format!("k{order}"), worst);
    }
    Ok(ConjugateReport { max_order_checked: check.max_order, condition_deviations: deviations })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    /// `tau(E(xi xi*))` evaluated by the moment engine.
    pub numeric: Complex64,
    /// `tau(B^-1* A^-1*)`.
    pub closed_form: Complex64,
}

impl FisherReport {
    pub fn deviation(&self) -> f64 {
        (self.numeric - self.closed_form).norm()
    }
}

pub fn fisher_information(cov_phi: &SandwichCovariance, tau: &OperatorTrace, tol: Tolerance) -> Result<FisherReport> {
    if tau.state.spectrum_size() != cov_phi.spectrum_size() {
        return Err(Error::DimensionMismatch { expected: cov_phi.spectrum_size(), found: tau.state.spectrum_size() });
    }
    let (a_inv, b_inv, c) = conjugate_coefficient(cov_phi, tol)?;
    // E(xi xi*) = E(X c c* X): the word xi (c*) X
    let word = MomentWord::new(vec![Letter::Xi, Letter::X], vec![c.adjoint()], None)?;
    let numeric = tau.apply(&joint_moment(&word, cov_phi, &c)?)?;
    let closed_form = tau.apply(&b_inv.adjoint().checked_mul(&a_inv.adjoint())?)?;
    Ok(FisherReport { numeric, closed_form })
}
