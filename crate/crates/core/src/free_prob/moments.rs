//! Moments of an operator-valued semicircular variable with a sandwich
//! covariance `b -> left * b * right`.

use std::collections::HashMap;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::free_prob::partition::{enumerate_nc, NcKind, NonCrossingPartition};
use crate::module::OperatorMatrix;

/// Largest moment order handled by the moment engine.
pub const MAX_MOMENT_ORDER: usize = 12;

/// The covariance map `b -> left * b * right` on operator matrices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichCovariance {
    pub left: OperatorMatrix,
    pub right: OperatorMatrix,
}

impl SandwichCovariance {
    pub fn new(left: OperatorMatrix, right: OperatorMatrix) -> Result<Self> {
        left.check_shape(&right)?;
        Ok(SandwichCovariance { left, right })
    }

    pub fn identity(d: usize, n: usize) -> Self {
        SandwichCovariance { left: OperatorMatrix::identity(d, n), right: OperatorMatrix::identity(d, n) }
    }

    pub fn dim(&self) -> usize {
        self.left.dim()
    }

    pub fn spectrum_size(&self) -> usize {
        self.left.spectrum_size()
    }

    pub fn apply(&self, b: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.left.checked_mul(b)?.checked_mul(&self.right)
    }

    pub(crate) fn check_coefficients(&self, coeffs: &[OperatorMatrix]) -> Result<()> {
        coeffs.iter().try_for_each(|c| self.left.check_shape(c))
    }
}

impl<'de> Deserialize<'de> for SandwichCovariance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            left: OperatorMatrix,
            right: OperatorMatrix,
        }
        let raw = Raw::deserialize(deserializer)?;
        SandwichCovariance::new(raw.left, raw.right).map_err(serde::de::Error::custom)
    }
}

fn check_order(m: usize) -> Result<()> {
    if m > MAX_MOMENT_ORDER {
        Err(Error::SizeLimit { size: m, limit: MAX_MOMENT_ORDER })
    } else {
        Ok(())
    }
}

/// `E(X b_1 X b_2 ... b_{m-1} X)` for `m = coeffs.len() + 1`.
///
/// Pairs the first `X` with each admissible partner; the enclosed word
/// and the remainder are moments of lower order. Every sub-word is a
/// contiguous range of the original coefficients, so the recursion is
/// memoised over letter intervals.
pub fn semicircular_moment(cov: &SandwichCovariance, coeffs: &[OperatorMatrix]) -> Result<OperatorMatrix> {
    let m = coeffs.len() + 1;
    check_order(m)?;
    cov.check_coefficients(coeffs)?;
    let (d, n) = (cov.dim(), cov.spectrum_size());
    if m % 2 == 1 {
        return Ok(OperatorMatrix::zeros(d, n));
    }
    let mut memo = HashMap::new();
    interval_moment(cov, coeffs, 0, m, &mut memo)
}

/// Moment of the letters `lo..hi`, with `coeffs[i]` between letters `i` and `i + 1`.
fn interval_moment(
    cov: &SandwichCovariance,
    coeffs: &[OperatorMatrix],
    lo: usize,
    hi: usize,
    memo: &mut HashMap<(usize, usize), OperatorMatrix>,
) -> Result<OperatorMatrix> {
    let (d, n) = (cov.dim(), cov.spectrum_size());
    if lo == hi {
        return Ok(OperatorMatrix::identity(d, n));
    }
    if (hi - lo) % 2 == 1 {
        return Ok(OperatorMatrix::zeros(d, n));
    }
    if let Some(m) = memo.get(&(lo, hi)) {
        return Ok(m.clone());
    }
    let mut acc = OperatorMatrix::zeros(d, n);
    for partner in (lo + 1..hi).step_by(2) {
        let inner = if partner == lo + 1 {
            coeffs[lo].clone()
        } else {
            let enclosed = interval_moment(cov, coeffs, lo + 1, partner, memo)?;
            &(&coeffs[lo] * &enclosed) * &coeffs[partner - 1]
        };
        let paired = cov.apply(&inner)?;
        let term = if partner + 1 == hi {
            paired
        } else {
            let rest = interval_moment(cov, coeffs, partner + 1, hi, memo)?;
            &(&paired * &coeffs[partner]) * &rest
        };
        acc = &acc + &term;
    }
    memo.insert((lo, hi), acc.clone());
    Ok(acc)
}

/// Evaluates a nested product along a non-crossing partition.
///
/// The word is `X c_0 X c_1 ... X c_{n-1}` with `c_{n-1} = trailing`. A
/// block whose letters are adjacent among the remaining ones is replaced by
/// `block_value(args) * c_last`, which is multiplied into the coefficient on
/// its left (or into the prefix when nothing is left of it). `args` are the
/// current coefficients between the block's letters.
pub(crate) fn collapse_partition(
    partition: &NonCrossingPartition,
    coeffs: &[OperatorMatrix],
    trailing: &OperatorMatrix,
    mut block_value: impl FnMut(&[OperatorMatrix]) -> Result<OperatorMatrix>,
) -> Result<OperatorMatrix> {
    let n = partition.size();
    debug_assert_eq!(coeffs.len() + 1, n);
    let mut current: Vec<OperatorMatrix> = coeffs.iter().cloned().chain(std::iter::once(trailing.clone())).collect();
    let mut prefix = OperatorMatrix::identity(trailing.dim(), trailing.spectrum_size());
    let mut alive: Vec<usize> = (0..n).collect();
    let mut pending: Vec<&Vec<usize>> = partition.blocks().iter().collect();
    while !pending.is_empty() {
        let (which, start) = pending
            .iter()
            .enumerate()
            .find_map(|(k, block)| {
                let start = alive.iter().position(|&l| l == block[0])?;
                let adjacent = block.iter().enumerate().all(|(i, &l)| alive.get(start + i) == Some(&l));
                adjacent.then_some((k, start))
            })
            .ok_or_else(|| Error::InvalidInput("partition has no interval block".into()))?;
        let block = pending.swap_remove(which);
        let args: Vec<OperatorMatrix> = block[..block.len() - 1].iter().map(|&l| current[l].clone()).collect();
        let value = &block_value(&args)? * &current[block[block.len() - 1]];
        if start == 0 {
            prefix = &prefix * &value;
        } else {
            let left = alive[start - 1];
            current[left] = &current[left] * &value;
        }
        alive.drain(start..start + block.len());
    }
    Ok(prefix)
}

/// Independent evaluation of [`semicircular_moment`] as a sum over
/// non-crossing pairings.
pub fn moment_pairing_oracle(cov: &SandwichCovariance, coeffs: &[OperatorMatrix]) -> Result<OperatorMatrix> {
    let m = coeffs.len() + 1;
    check_order(m)?;
    cov.check_coefficients(coeffs)?;
    let (d, n) = (cov.dim(), cov.spectrum_size());
    let identity = OperatorMatrix::identity(d, n);
    let mut acc = OperatorMatrix::zeros(d, n);
    for pairing in enumerate_nc(NcKind::Pairings, m)? {
        let term = collapse_partition(&pairing, coeffs, &identity, |args| cov.apply(&args[0]))?;
        acc = &acc + &term;
    }
    Ok(acc)
}
