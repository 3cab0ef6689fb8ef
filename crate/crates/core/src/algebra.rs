//! The coefficient algebra: a commutative unital C*-algebra realized as
//! complex functions on a finite spectrum `{0, .., n-1}` with pointwise
//! operations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, Error, Result};

/// Default relative tolerance for zero / invertibility decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative numerical tolerance.
///
/// A quantity is treated as zero when its modulus is at most
/// `tol * max(1, scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance(pub f64);

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(DEFAULT_TOL)
    }
}

impl Tolerance {
    pub fn new(tol: f64) -> Result<Self> {
        if tol.is_finite() && tol > 0.0 {
            Ok(Tolerance(tol))
        } else {
            Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")))
        }
    }

    #[inline]
    pub fn threshold(self, scale: f64) -> f64 {
        self.0 * scale.max(1.0)
    }
}

/// Binary / unary operations exposed through [`Element::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Star,
    Neg,
}

/// Three-way numerical classification of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Zero,
    Invertible,
    /// Vanishes at some spectrum points but not all.
    Neither,
}

/// Element of the coefficient algebra, i.e. a function on the spectrum.
#[derive(Clone, PartialEq)]
pub struct Element {
    values: Vec<Complex64>,
}

impl Element {
    /// Panics if `values` is empty.
    pub fn new(values: Vec<Complex64>) -> Self {
        assert!(!values.is_empty(), "spectrum must have at least one point");
        Element { values }
    }

    pub fn try_new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty spectrum".into()));
        }
        Ok(Element { values })
    }

    pub fn from_real(values: &[f64]) -> Self {
        Element::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(n: usize, value: Complex64) -> Self {
        Element::new(vec![value; n])
    }

    pub fn zero(n: usize) -> Self {
        Element::constant(n, Complex64::new(0.0, 0.0))
    }

    pub fn unit(n: usize) -> Self {
        Element::constant(n, Complex64::new(1.0, 0.0))
    }

    #[inline]
    pub fn spectrum_size(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, t: usize) -> Complex64 {
        self.values[t]
    }

    /// C*-norm: maximum modulus over the spectrum.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn star(&self) -> Element {
        self.map(|v| v.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Element {
        Element { values: self.values.iter().map(|&v| f(v)).collect() }
    }

    fn zip(&self, other: &Element, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Element> {
        check_dim(self.spectrum_size(), other.spectrum_size())?;
        Ok(Element {
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Dimension-checked arithmetic. `Star` and `Neg` ignore `other` apart
    /// from the spectrum-size check.
    pub fn arith(&self, other: &Element, op: ArithOp) -> Result<Element> {
        check_dim(self.spectrum_size(), other.spectrum_size())?;
        Ok(match op {
            ArithOp::Add => self.zip(other, |a, b| a + b)?,
            ArithOp::Sub => self.zip(other, |a, b| a - b)?,
            ArithOp::Mul => self.zip(other, |a, b| a * b)?,
            ArithOp::Star => self.star(),
            ArithOp::Neg => self.map(|a| -a),
        })
    }

    pub fn scale(&self, s: Complex64) -> Element {
        self.map(|v| v * s)
    }

    pub fn classify(&self, tol: Tolerance) -> Class {
        let thr = tol.threshold(self.norm());
        let small = self.values.iter().filter(|v| v.norm() <= thr).count();
        if small == self.values.len() {
            Class::Zero
        } else if small == 0 {
            Class::Invertible
        } else {
            Class::Neither
        }
    }

    pub fn is_invertible(&self, tol: Tolerance) -> bool {
        self.classify(tol) == Class::Invertible
    }

    pub fn is_zero(&self, tol: Tolerance) -> bool {
        self.classify(tol) == Class::Zero
    }

    /// Pointwise reciprocal.
    pub fn inverse(&self, tol: Tolerance) -> Result<Element> {
        let thr = tol.threshold(self.norm());
        if let Some(point) = self.values.iter().position(|v| v.norm() <= thr) {
            return Err(Error::NotInvertible { point });
        }
        Ok(self.map(|v| v.inv()))
    }

    /// Largest pointwise deviation from `other`.
    pub fn distance(&self, other: &Element) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.values.iter()).finish()
    }
}

macro_rules! pointwise_op {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Element> for &Element {
            type Output = Element;
            /// Panics on mismatched spectrum sizes; use [`Element::arith`] for a checked variant.
            fn $method(self, rhs: &Element) -> Element {
                assert_eq!(self.spectrum_size(), rhs.spectrum_size(), "spectrum size mismatch");
                self.zip(rhs, |a, b| a $op b).expect("checked above")
            }
        }
        impl $tr<Element> for Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                (&self).$method(&rhs)
            }
        }
    };
}

pointwise_op!(Add, add, +);
pointwise_op!(Sub, sub, -);
pointwise_op!(Mul, mul, *);

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.map(|v| -v)
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.values.iter().map(|v| [v.re, v.im]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(deserializer)?;
        Element::try_new(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// Faithful state on the coefficient algebra: a strictly positive
/// probability vector over the spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraState {
    weights: Vec<f64>,
}

impl AlgebraState {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("state needs at least one weight".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidInput(format!("state weights must be strictly positive, got {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 * weights.len() as f64 {
            return Err(Error::InvalidInput(format!("state weights must sum to 1, got {total}")));
        }
        Ok(AlgebraState { weights })
    }

    pub fn uniform(n: usize) -> Self {
        AlgebraState { weights: vec![1.0 / n as f64; n] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn spectrum_size(&self) -> usize {
        self.weights.len()
    }

    pub fn apply(&self, a: &Element) -> Result<Complex64> {
        check_dim(self.weights.len(), a.spectrum_size())?;
        Ok(self.weights.iter().zip(a.values()).map(|(&w, &v)| v * w).sum())
    }
}

impl<'de> Deserialize<'de> for AlgebraState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            weights: Vec<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        AlgebraState::new(raw.weights).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pointwise_product() {
        let a = Element::from_real(&[1.0, 2.0]);
        let b = Element::from_real(&[3.0, 4.0]);
        assert_eq!(a.arith(&b, ArithOp::Mul).unwrap(), Element::from_real(&[3.0, 8.0]));
    }

    #[test]
    fn star_conjugates() {
        let a = Element::new(vec![c(1.0, 1.0), c(0.0, 0.0)]);
        assert_eq!(a.star(), Element::new(vec![c(1.0, -1.0), c(0.0, 0.0)]));
    }

    #[test]
    fn additive_inverse() {
        let a = Element::new(vec![c(0.3, -1.2), c(2.5, 0.7), c(-4.0, 0.1)]);
        let neg = a.arith(&a, ArithOp::Neg).unwrap();
        assert!(a.arith(&neg, ArithOp::Add).unwrap().is_zero(Tolerance::default()));
        assert_eq!(&a + &neg, Element::zero(3));
    }

    #[test]
    fn mismatched_sizes() {
        let a = Element::unit(2);
        let b = Element::unit(3);
        assert_eq!(
            a.arith(&b, ArithOp::Add),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn inverse_cases() {
        let tol = Tolerance::default();
        assert_eq!(Element::from_real(&[2.0, 4.0]).inverse(tol).unwrap(), Element::from_real(&[0.5, 0.25]));
        assert_eq!(Element::from_real(&[1.0, 0.0]).inverse(tol), Err(Error::NotInvertible { point: 1 }));
        assert_eq!(Element::unit(4).inverse(tol).unwrap(), Element::unit(4));
    }

    #[test]
    fn three_way_classes() {
        let tol = Tolerance::default();
        let a = Element::from_real(&[1.0, 2.0]);
        assert!(a.is_invertible(tol) && !a.is_zero(tol));
        let z = Element::from_real(&[0.0, 0.0]);
        assert!(!z.is_invertible(tol) && z.is_zero(tol));
        let m = Element::from_real(&[1.0, 0.0]);
        assert!(!m.is_invertible(tol) && !m.is_zero(tol));
        assert_eq!(m.classify(tol), Class::Neither);
    }

    #[test]
    fn threshold_is_scale_aware() {
        let tol = Tolerance::default();
        // 1e-7 is tiny but well above 1e-9 * max(1, 1e-7)
        assert!(Element::from_real(&[1e-7]).is_invertible(tol));
        // relative to a large norm, 1e-4 is negligible
        assert_eq!(Element::from_real(&[1e6, 1e-4]).classify(tol), Class::Neither);
    }

    #[test]
    fn state_validation() {
        assert!(AlgebraState::new(vec![0.5, 0.5]).is_ok());
        assert!(AlgebraState::new(vec![1.0, 0.0]).is_err());
        assert!(AlgebraState::new(vec![0.4, 0.4]).is_err());
        let s = AlgebraState::uniform(2);
        assert_eq!(s.apply(&Element::from_real(&[1.0, 3.0])).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn json_encoding() {
        let a = Element::new(vec![c(1.0, -2.0), c(0.5, 0.0)]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[[1.0,-2.0],[0.5,0.0]]");
        let back: Element = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Element>("[]").is_err());
        let st: AlgebraState = serde_json::from_str(r#"{"weights":[0.25,0.75]}"#).unwrap();
        assert_eq!(st.weights(), &[0.25, 0.75]);
        assert!(serde_json::from_str::<AlgebraState>(r#"{"weights":[0.0,1.0]}"#).is_err());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn element(n: usize) -> impl Strategy<Value = Element> {
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n)
            .prop_map(|v| Element::new(v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()))
    }

    proptest! {
        #[test]
        fn star_reverses_products((a, b) in (1usize..5).prop_flat_map(|n| (element(n), element(n)))) {
            let lhs = (&a * &b).star();
            prop_assert!(lhs.distance(&(&b.star() * &a.star())) < 1e-12);
            prop_assert!(lhs.distance(&(&a.star() * &b.star())) < 1e-12);
        }

        #[test]
        fn c_star_identity(a in (1usize..5).prop_flat_map(element)) {
            let lhs = (&a.star() * &a).norm();
            let rhs = a.norm() * a.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn inverse_is_pointwise_reciprocal(a in (1usize..5).prop_flat_map(element)) {
            let tol = Tolerance::default();
            if a.is_invertible(tol) {
                let prod = &a * &a.inverse(tol).unwrap();
                prop_assert!(prod.distance(&Element::unit(a.spectrum_size())) <= 1e-12);
            }
        }

        #[test]
        fn state_is_faithful(a in (1usize..5).prop_flat_map(element)) {
            let state = AlgebraState::uniform(a.spectrum_size());
            let v = state.apply(&(&a.star() * &a)).unwrap();
            prop_assert!(v.re >= 0.0 && v.im.abs() < 1e-12);
            if v.re == 0.0 {
                prop_assert!(a.norm() == 0.0);
            }
        }
    }
}
