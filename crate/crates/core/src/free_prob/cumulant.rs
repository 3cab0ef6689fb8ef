//! Moment words mixing `X` and `xi = X c`, and their operator-valued cumulants.

use std::cell::RefCell;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_prob::moments::{collapse_partition, semicircular_moment, SandwichCovariance};
use crate::free_prob::partition::{enumerate_nc, NcKind, NonCrossingPartition};
use crate::module::OperatorMatrix;

/// Largest number of letters accepted by [`cumulant`].
pub const MAX_CUMULANT_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Letter {
    X,
    /// `xi = X c`
    #[serde(rename = "XI")]
    Xi,
}

/// `L_1 b_1 L_2 ... b_{k-1} L_k [right_cap]` with letters `L_i` in `{X, XI}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentWord {
    letters: Vec<Letter>,
    coefficients: Vec<OperatorMatrix>,
    right_cap: Option<OperatorMatrix>,
}

impl MomentWord {
    pub fn new(letters: Vec<Letter>, coefficients: Vec<OperatorMatrix>, right_cap: Option<OperatorMatrix>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidInput("moment word needs at least one letter".into()));
        }
        if coefficients.len() + 1 != letters.len() {
            return Err(Error::InvalidInput(format!(
                "{} letters need {} coefficients, got {}",
                letters.len(),
                letters.len() - 1,
                coefficients.len()
            )));
        }
        if let Some(first) = coefficients.first().or(right_cap.as_ref()) {
            for c in coefficients.iter().chain(right_cap.as_ref()) {
                first.check_shape(c)?;
            }
        }
        Ok(MomentWord { letters, coefficients, right_cap })
    }

    /// All-`X` word with the given interleaved coefficients.
    pub fn pure(coefficients: Vec<OperatorMatrix>) -> Self {
        let letters = vec![Letter::X; coefficients.len() + 1];
        MomentWord { letters, coefficients, right_cap: None }
    }

    /// `xi b_1 X ... b_m X`.
    pub fn leading_xi(coefficients: Vec<OperatorMatrix>) -> Self {
        let mut letters = vec![Letter::X; coefficients.len() + 1];
        letters[0] = Letter::Xi;
        MomentWord { letters, coefficients, right_cap: None }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Rewrites every `XI` as `X` with `c` multiplied into the coefficient
    /// that follows it. Returns the pure-`X` coefficients and the right cap.
    pub fn fold(&self, c: &OperatorMatrix) -> Result<(Vec<OperatorMatrix>, OperatorMatrix)> {
        if let Some(first) = self.coefficients.first() {
            first.check_shape(c)?;
        }
        let mut coeffs = self.coefficients.clone();
        let mut cap = self
            .right_cap
            .clone()
            .unwrap_or_else(|| OperatorMatrix::identity(c.dim(), c.spectrum_size()));
        c.check_shape(&cap)?;
        let last = self.letters.len() - 1;
        for (i, letter) in self.letters.iter().enumerate() {
            if *letter == Letter::Xi {
                if i == last {
                    cap = c * &cap;
                } else {
                    coeffs[i] = c * &coeffs[i];
                }
            }
        }
        Ok((coeffs, cap))
    }
}

/// `E(word)` with `xi = X c`.
pub fn joint_moment(word: &MomentWord, cov: &SandwichCovariance, c: &OperatorMatrix) -> Result<OperatorMatrix> {
    let (coeffs, cap) = word.fold(c)?;
    cov.left.check_shape(&cap)?;
    semicircular_moment(cov, &coeffs)?.checked_mul(&cap)
}

/// Cumulant `k^(n)` of the word's letters, `xi = X c`.
pub fn cumulant(word: &MomentWord, cov: &SandwichCovariance, c: &OperatorMatrix) -> Result<OperatorMatrix> {
    let (coeffs, cap) = word.fold(c)?;
    cov.left.check_shape(&cap)?;
    CumulantEngine::new(cov).cumulant(&coeffs)?.checked_mul(&cap)
}

/// Cumulants `k^(n)(X (x) b_1 X (x) ... (x) b_{n-1} X)` from the moments of
/// a semicircular variable, by moment-cumulant inversion over `NC(n)`.
///
/// Sub-cumulants are cached on the exact bit pattern of their arguments, so
/// repeated blocks across partitions are evaluated once.
pub struct CumulantEngine<'a> {
    cov: &'a SandwichCovariance,
    partitions: RefCell<HashMap<usize, std::rc::Rc<Vec<NonCrossingPartition>>>>,
    cache: RefCell<HashMap<Vec<u64>, OperatorMatrix>>,
}

impl<'a> CumulantEngine<'a> {
    pub fn new(cov: &'a SandwichCovariance) -> Self {
        CumulantEngine { cov, partitions: RefCell::default(), cache: RefCell::default() }
    }

    pub fn cumulant(&self, coeffs: &[OperatorMatrix]) -> Result<OperatorMatrix> {
        let n = coeffs.len() + 1;
        if n > MAX_CUMULANT_ORDER {
            return Err(Error::SizeLimit { size: n, limit: MAX_CUMULANT_ORDER });
        }
        self.cov.check_coefficients(coeffs)?;
        self.cumulant_unchecked(coeffs)
    }

    fn partitions(&self, n: usize) -> Result<std::rc::Rc<Vec<NonCrossingPartition>>> {
        if let Some(p) = self.partitions.borrow().get(&n) {
            return Ok(p.clone());
        }
        let p = std::rc::Rc::new(enumerate_nc(NcKind::Partitions, n)?);
        self.partitions.borrow_mut().insert(n, p.clone());
        Ok(p)
    }

    fn cumulant_unchecked(&self, coeffs: &[OperatorMatrix]) -> Result<OperatorMatrix> {
        let mut key = Vec::new();
        key.push(coeffs.len() as u64);
        for c in coeffs {
            c.push_bits(&mut key);
        }
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let n = coeffs.len() + 1;
        let (d, s) = (self.cov.dim(), self.cov.spectrum_size());
        let identity = OperatorMatrix::identity(d, s);
        // k_n = E(word) - sum over pi != 1_n of the nested product k_pi
        let mut value = semicircular_moment(self.cov, coeffs)?;
        for pi in self.partitions(n)?.iter().filter(|p| !p.is_one_block()) {
            let term = collapse_partition(pi, coeffs, &identity, |args| self.cumulant_unchecked(args))?;
            value = &value - &term;
        }
        self.cache.borrow_mut().insert(key, value.clone());
        Ok(value)
    }
}
