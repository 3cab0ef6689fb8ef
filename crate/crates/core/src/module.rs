//! The truncated standard Hilbert module over the coefficient algebra:
//! `d` free generators with the standard orthonormal basis, the
//! algebra-valued inner product, rank-one operators and adjointable
//! operator matrices.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{Class, Element, Tolerance};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, CMatrix, CVector};

/// A vector of the module: `d` coordinates with respect to the standard basis.
#[derive(Clone, PartialEq)]
pub struct ModuleVector {
    coords: Vec<Element>,
}

impl ModuleVector {
    pub fn new(coords: Vec<Element>) -> Result<Self> {
        let first = coords.first().ok_or_else(|| Error::InvalidInput("module vector needs d >= 1".into()))?;
        let n = first.spectrum_size();
        for c in &coords {
            check_dim(n, c.spectrum_size())?;
        }
        Ok(ModuleVector { coords })
    }

    pub fn zero(d: usize, n: usize) -> Self {
        ModuleVector { coords: vec![Element::zero(n); d] }
    }

    /// Standard basis vector `e_i`.
    pub fn basis(i: usize, d: usize, n: usize) -> Self {
        let mut v = Self::zero(d, n);
        v.coords[i] = Element::unit(n);
        v
    }

    /// Builds a vector from its value `x(t)` in `C^d` at each spectrum point.
    pub(crate) fn from_points(points: &[CVector]) -> Self {
        let d = points[0].len();
        let coords = (0..d)
            .map(|i| Element::new(points.iter().map(|p| p[i]).collect()))
            .collect();
        ModuleVector { coords }
    }

    pub fn from_real(d_by_n: &[&[f64]]) -> Result<Self> {
        Self::new(d_by_n.iter().map(|c| Element::from_real(c)).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn spectrum_size(&self) -> usize {
        self.coords[0].spectrum_size()
    }

    pub fn coords(&self) -> &[Element] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Element {
        &self.coords[i]
    }

    /// The complex vector `x(t)`.
    pub(crate) fn at(&self, t: usize) -> CVector {
        CVector::from_iterator(self.dim(), self.coords.iter().map(|c| c.at(t)))
    }

    /// Left module action `alpha * x`.
    pub fn scale(&self, alpha: &Element) -> ModuleVector {
        ModuleVector { coords: self.coords.iter().map(|c| alpha * c).collect() }
    }

    pub fn checked_add(&self, other: &ModuleVector) -> Result<ModuleVector> {
        self.check_shape(other)?;
        Ok(ModuleVector { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() })
    }

    pub fn checked_sub(&self, other: &ModuleVector) -> Result<ModuleVector> {
        self.check_shape(other)?;
        Ok(ModuleVector { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() })
    }

    fn check_shape(&self, other: &ModuleVector) -> Result<()> {
        check_dim(self.dim(), other.dim())?;
        check_dim(self.spectrum_size(), other.spectrum_size())
    }

    /// `<self, other> = sum_i self_i * star(other_i)`.
    pub fn inner(&self, other: &ModuleVector) -> Result<Element> {
        inner_product(self, other)
    }

    /// `sqrt(|<v, v>|)`.
    pub fn norm(&self) -> f64 {
        self.inner(self).expect("same shape").norm().sqrt()
    }

    /// Largest modulus over all coordinates and spectrum points.
    pub fn max_abs(&self) -> f64 {
        self.coords.iter().map(Element::norm).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &ModuleVector) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a.distance(b)).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: Tolerance) -> bool {
        self.max_abs() <= tol.threshold(0.0)
    }

    /// Every coordinate is zero or invertible, and the vector is nonzero.
    pub fn is_coordinate_invertible(&self, tol: Tolerance) -> bool {
        let classes: Vec<Class> = self.coords.iter().map(|c| c.classify(tol)).collect();
        classes.iter().all(|&c| c != Class::Neither) && classes.contains(&Class::Invertible)
    }
}

impl fmt::Debug for ModuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords.iter()).finish()
    }
}

impl Serialize for ModuleVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ModuleVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        ModuleVector::new(Vec::<Element>::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

/// Algebra-valued inner product, linear in `x` and conjugate-linear in `y`.
pub fn inner_product(x: &ModuleVector, y: &ModuleVector) -> Result<Element> {
    x.check_shape(y)?;
    let n = x.spectrum_size();
    Ok(x.coords.iter().zip(&y.coords).fold(Element::zero(n), |acc, (a, b)| &acc + &(a * &b.star())))
}

/// A `d x d` matrix over the coefficient algebra acting on module vectors.
///
/// Stored as one complex `d x d` matrix per spectrum point.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    points: Vec<CMatrix>,
}

impl OperatorMatrix {
    pub(crate) fn from_points(points: Vec<CMatrix>) -> Self {
        debug_assert!(!points.is_empty());
        debug_assert!(points.iter().all(|p| p.is_square() && p.nrows() == points[0].nrows()));
        OperatorMatrix { points }
    }

    pub fn zeros(d: usize, n: usize) -> Self {
        Self::from_points(vec![CMatrix::zeros(d, d); n])
    }

    pub fn identity(d: usize, n: usize) -> Self {
        Self::from_points(vec![CMatrix::identity(d, d); n])
    }

    /// Scalar multiple of the identity, `alpha * I`.
    pub fn diagonal_scalar(d: usize, alpha: &Element) -> Self {
        OperatorMatrix::identity(d, alpha.spectrum_size()).scale(alpha)
    }

    pub fn diagonal(entries: &[Element]) -> Result<Self> {
        let d = entries.len();
        let mut rows = vec![vec![Element::zero(entries.first().map_or(1, Element::spectrum_size)); d]; d];
        for (i, e) in entries.iter().enumerate() {
            rows[i][i] = e.clone();
        }
        Self::from_entries(rows)
    }

    /// Builds a matrix from `rows[i][j]`.
    pub fn from_entries(rows: Vec<Vec<Element>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::InvalidInput("operator needs d >= 1".into()));
        }
        let n = rows[0].first().map(Element::spectrum_size).ok_or_else(|| Error::InvalidInput("empty row".into()))?;
        for row in &rows {
            check_dim(d, row.len())?;
            for e in row {
                check_dim(n, e.spectrum_size())?;
            }
        }
        let points = (0..n).map(|t| CMatrix::from_fn(d, d, |i, j| rows[i][j].at(t))).collect();
        Ok(OperatorMatrix { points })
    }

    pub fn from_real(rows: &[&[f64]], n: usize) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| Element::constant(n, Complex64::new(v, 0.0))).collect())
            .collect();
        Self::from_entries(rows)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.points[0].nrows()
    }

    #[inline]
    pub fn spectrum_size(&self) -> usize {
        self.points.len()
    }

    pub(crate) fn point(&self, t: usize) -> &CMatrix {
        &self.points[t]
    }

    pub(crate) fn points(&self) -> &[CMatrix] {
        &self.points
    }

    pub fn entry(&self, i: usize, j: usize) -> Element {
        Element::new(self.points.iter().map(|p| p[(i, j)]).collect())
    }

    pub fn entries(&self) -> Vec<Vec<Element>> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| self.entry(i, j)).collect()).collect()
    }

    pub(crate) fn check_shape(&self, other: &OperatorMatrix) -> Result<()> {
        check_dim(self.dim(), other.dim())?;
        check_dim(self.spectrum_size(), other.spectrum_size())
    }

    fn zip(&self, other: &OperatorMatrix, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> OperatorMatrix {
        OperatorMatrix { points: self.points.iter().zip(&other.points).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn checked_mul(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_shape(other)?;
        Ok(self.zip(other, |a, b| a * b))
    }

    pub fn checked_add(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_shape(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_shape(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    /// Module action `alpha * M`.
    pub fn scale(&self, alpha: &Element) -> OperatorMatrix {
        assert_eq!(alpha.spectrum_size(), self.spectrum_size(), "spectrum size mismatch");
        OperatorMatrix {
            points: self.points.iter().zip(alpha.values()).map(|(p, &a)| p * a).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> OperatorMatrix {
        OperatorMatrix { points: self.points.iter().map(|p| p * s).collect() }
    }

    /// `(M v)_i = sum_j M_ij v_j`.
    pub fn apply(&self, v: &ModuleVector) -> Result<ModuleVector> {
        check_dim(self.dim(), v.dim())?;
        check_dim(self.spectrum_size(), v.spectrum_size())?;
        let pts: Vec<CVector> = self.points.iter().enumerate().map(|(t, p)| p * v.at(t)).collect();
        Ok(ModuleVector::from_points(&pts))
    }

    /// Conjugate transpose over the algebra: `adjoint(M)_ij = star(M_ji)`.
    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix { points: self.points.iter().map(|p| p.adjoint()).collect() }
    }

    /// Transpose without entrywise star.
    pub fn transpose(&self) -> OperatorMatrix {
        OperatorMatrix { points: self.points.iter().map(|p| p.transpose()).collect() }
    }

    /// Entrywise star without transposing.
    pub fn conjugate(&self) -> OperatorMatrix {
        OperatorMatrix { points: self.points.iter().map(|p| p.map(|z| z.conj())).collect() }
    }

    /// Largest entry modulus over all spectrum points.
    pub fn max_abs(&self) -> f64 {
        self.points.iter().flat_map(|p| p.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &OperatorMatrix) -> f64 {
        self.points
            .iter()
            .zip(&other.points)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    /// Pointwise complex rank at every spectrum point.
    pub fn pointwise_rank(&self, tol: Tolerance) -> Vec<usize> {
        self.points.iter().map(|p| linalg::numerical_rank(p, tol)).collect()
    }

    /// Pointwise determinant as an algebra element.
    pub fn determinant(&self) -> Element {
        Element::new(self.points.iter().map(|p| p.determinant()).collect())
    }

    /// Injective at every spectrum point (equivalently invertible, `d` being finite).
    pub fn is_invertible(&self, tol: Tolerance) -> bool {
        self.first_singular_point(tol).is_none()
    }

    fn first_singular_point(&self, tol: Tolerance) -> Option<usize> {
        self.points.iter().position(|p| !linalg::is_injective(p, tol))
    }

    pub fn inverse(&self, tol: Tolerance) -> Result<OperatorMatrix> {
        if let Some(point) = self.first_singular_point(tol) {
            return Err(Error::NotInvertible { point });
        }
        let points = self
            .points
            .iter()
            .enumerate()
            .map(|(t, p)| p.clone().try_inverse().ok_or(Error::NotInvertible { point: t }))
            .collect::<Result<Vec<_>>>()?;
        Ok(OperatorMatrix { points })
    }

    /// Largest pointwise condition number.
    pub fn condition_number(&self) -> f64 {
        self.points.iter().map(linalg::condition_number).fold(0.0, f64::max)
    }

    /// Bit pattern of all entries, used as an exact cache key.
    pub(crate) fn push_bits(&self, key: &mut Vec<u64>) {
        for p in &self.points {
            for z in p.iter() {
                key.push(z.re.to_bits());
                key.push(z.im.to_bits());
            }
        }
    }
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries().iter()).finish()
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.checked_mul(rhs).expect("operator shape mismatch")
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.checked_add(rhs).expect("operator shape mismatch")
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.checked_sub(rhs).expect("operator shape mismatch")
    }
}

impl Serialize for OperatorMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OperatorMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Element>>::deserialize(deserializer)?;
        OperatorMatrix::from_entries(rows).map_err(serde::de::Error::custom)
    }
}

/// The rank-one operator `theta_{x,y}(xi) = <xi, y> x`, with entries `x_i * star(y_j)`.
pub fn theta(x: &ModuleVector, y: &ModuleVector) -> Result<OperatorMatrix> {
    x.check_shape(y)?;
    let points = (0..x.spectrum_size()).map(|t| x.at(t) * y.at(t).adjoint()).collect();
    Ok(OperatorMatrix::from_points(points))
}

pub fn adjoint(m: &OperatorMatrix) -> OperatorMatrix {
    m.adjoint()
}

pub fn is_coordinate_invertible(x: &ModuleVector, tol: Tolerance) -> bool {
    x.is_coordinate_invertible(tol)
}

/// Pairs `(M e_i, e_i)` with `M = sum_i theta(M e_i, e_i)`.
pub fn finite_rank_expand(m: &OperatorMatrix) -> Vec<(ModuleVector, ModuleVector)> {
    let (d, n) = (m.dim(), m.spectrum_size());
    (0..d)
        .map(|i| {
            let e = ModuleVector::basis(i, d, n);
            (m.apply(&e).expect("same shape"), e)
        })
        .collect()
}

/// Sums `theta(x, y)` over the given pairs.
pub fn sum_thetas(pairs: &[(ModuleVector, ModuleVector)]) -> Result<OperatorMatrix> {
    let (x0, _) = pairs.first().ok_or_else(|| Error::InvalidInput("empty expansion".into()))?;
    let mut acc = OperatorMatrix::zeros(x0.dim(), x0.spectrum_size());
    for (x, y) in pairs {
        acc = acc.checked_add(&theta(x, y)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Sampler;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn inner_product_single_coordinate() {
        let x = ModuleVector::from_real(&[&[1.0, 2.0], &[0.0, 0.0]]).unwrap();
        let y = ModuleVector::from_real(&[&[1.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(inner_product(&x, &y).unwrap(), Element::from_real(&[1.0, 2.0]));
    }

    #[test]
    fn basis_is_orthonormal() {
        let (d, n) = (3, 2);
        for i in 0..d {
            for j in 0..d {
                let ip = inner_product(&ModuleVector::basis(i, d, n), &ModuleVector::basis(j, d, n)).unwrap();
                let expected = if i == j { Element::unit(n) } else { Element::zero(n) };
                assert_eq!(ip, expected);
            }
        }
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        let x = ModuleVector::zero(2, 1);
        let y = ModuleVector::zero(3, 1);
        assert!(matches!(inner_product(&x, &y), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn inner_product_is_linear_in_first_slot() {
        let mut s = Sampler::new(11);
        for _ in 0..20 {
            let (x, y, a) = (s.vector(3, 2), s.vector(3, 2), s.element(2));
            let lhs = inner_product(&x.scale(&a), &y).unwrap();
            let rhs = &a * &inner_product(&x, &y).unwrap();
            assert!(lhs.distance(&rhs) < 1e-12);
            // conjugate-linear in the second
            let lhs = inner_product(&x, &y.scale(&a)).unwrap();
            let rhs = &a.star() * &inner_product(&x, &y).unwrap();
            assert!(lhs.distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn theta_matrix_unit() {
        let x = ModuleVector::from_real(&[&[1.0], &[0.0]]).unwrap();
        let y = ModuleVector::from_real(&[&[0.0], &[1.0]]).unwrap();
        let expected = OperatorMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]], 1).unwrap();
        assert_eq!(theta(&x, &y).unwrap(), expected);
    }

    #[test]
    fn theta_scalar_identities() {
        let mut s = Sampler::new(3);
        for _ in 0..20 {
            let (x, y, a) = (s.vector(3, 2), s.vector(3, 2), s.element(2));
            let lhs = theta(&x, &y.scale(&a)).unwrap();
            let rhs = theta(&x.scale(&a.star()), &y).unwrap();
            assert!(lhs.distance(&rhs) < 1e-12);
            let lhs = theta(&x, &y).unwrap().scale(&a);
            let rhs = theta(&x.scale(&a), &y).unwrap();
            assert!(lhs.distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn theta_acts_by_inner_product() {
        let mut s = Sampler::new(5);
        let (x, y, xi) = (s.vector(3, 3), s.vector(3, 3), s.vector(3, 3));
        let lhs = theta(&x, &y).unwrap().apply(&xi).unwrap();
        let rhs = x.scale(&inner_product(&xi, &y).unwrap());
        assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn adjoint_identities() {
        let mut s = Sampler::new(9);
        for _ in 0..20 {
            let (x, y) = (s.vector(3, 2), s.vector(3, 2));
            let th = theta(&x, &y).unwrap();
            // entrywise: adjoint(theta_{x,y})_ij = star(x_j star(y_i)) = y_i star(x_j)
            for i in 0..3 {
                for j in 0..3 {
                    let expected = y.coord(i) * &x.coord(j).star();
                    assert!(th.adjoint().entry(i, j).distance(&expected) < 1e-14);
                }
            }
            assert!(adjoint(&th).distance(&theta(&y, &x).unwrap()) < 1e-14);
            let m = s.operator(3, 2);
            assert_eq!(m.adjoint().adjoint(), m);
            let lhs = inner_product(&m.apply(&x).unwrap(), &y).unwrap();
            let rhs = inner_product(&x, &m.adjoint().apply(&y).unwrap()).unwrap();
            assert!(lhs.distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn coordinate_invertibility() {
        for i in 0..3 {
            assert!(is_coordinate_invertible(&ModuleVector::basis(i, 3, 2), tol()));
        }
        let ok = ModuleVector::from_real(&[&[1.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!(is_coordinate_invertible(&ok, tol()));
        let mixed = ModuleVector::from_real(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
        assert!(!is_coordinate_invertible(&mixed, tol()));
        assert!(!is_coordinate_invertible(&ModuleVector::zero(2, 2), tol()));
    }

    #[test]
    fn expansion_of_identity() {
        let pairs = finite_rank_expand(&OperatorMatrix::identity(3, 2));
        for (i, (x, e)) in pairs.iter().enumerate() {
            assert_eq!(x, &ModuleVector::basis(i, 3, 2));
            assert_eq!(e, &ModuleVector::basis(i, 3, 2));
        }
    }

    #[test]
    fn expansion_resums() {
        let mut s = Sampler::new(21);
        let th = theta(&s.vector(3, 2), &s.vector(3, 2)).unwrap();
        assert!(sum_thetas(&finite_rank_expand(&th)).unwrap().distance(&th) < 1e-14);
        for _ in 0..20 {
            let m = s.operator(3, 2);
            assert!(sum_thetas(&finite_rank_expand(&m)).unwrap().distance(&m) < 1e-14);
        }
    }

    #[test]
    fn operator_json_shape_is_validated() {
        let m = OperatorMatrix::from_real(&[&[1.0, 2.0], &[3.0, 4.0]], 1).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[[1.0,0.0]],[[2.0,0.0]]],[[[3.0,0.0]],[[4.0,0.0]]]]");
        assert_eq!(serde_json::from_str::<OperatorMatrix>(&s).unwrap(), m);
        assert!(serde_json::from_str::<OperatorMatrix>("[[[[1.0,0.0]],[[2.0,0.0]]]]").is_err());
        assert!(serde_json::from_str::<OperatorMatrix>("[[[[1.0,0.0]]],[[[1.0,0.0],[2.0,0.0]]]]").is_err());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::sample::Sampler;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn theta_composition(seed in any::<u64>(), d in 1usize..4, n in 1usize..4) {
            let mut s = Sampler::new(seed);
            let (x, y, u, v) = (s.vector(d, n), s.vector(d, n), s.vector(d, n), s.vector(d, n));
            let lhs = &theta(&x, &y).unwrap() * &theta(&u, &v).unwrap();
            let rhs = theta(&x.scale(&inner_product(&u, &y).unwrap()), &v).unwrap();
            prop_assert!(lhs.distance(&rhs) < 1e-12);
        }

        #[test]
        fn inner_product_hermitian(seed in any::<u64>(), d in 1usize..4, n in 1usize..4) {
            let mut s = Sampler::new(seed);
            let (x, y) = (s.vector(d, n), s.vector(d, n));
            let lhs = inner_product(&x, &y).unwrap().star();
            prop_assert!(lhs.distance(&inner_product(&y, &x).unwrap()) < 1e-14);
            let xx = inner_product(&x, &x).unwrap();
            for v in xx.values() {
                prop_assert!(v.re >= 0.0 && v.im.abs() < 1e-14);
            }
        }

        #[test]
        fn zero_theta_against_ci_vector_forces_zero(seed in any::<u64>(), d in 1usize..4, n in 1usize..4) {
            let mut s = Sampler::new(seed);
            let y = s.ci_vector(d, n);
            let x = s.vector(d, n);
            let th = theta(&x, &y).unwrap();
            // constructive: pick a basis vector whose coordinate of y is invertible
            let k = (0..d).find(|&k| y.coord(k).is_invertible(Tolerance::default())).unwrap();
            let e = ModuleVector::basis(k, d, n);
            // theta(x, y) e_k = star(y_k) x
            let recovered = th.apply(&e).unwrap().scale(&y.coord(k).star().inverse(Tolerance::default()).unwrap());
            prop_assert!(recovered.distance(&x) < 1e-9);
            // and a zero theta therefore only arises from x = 0
            let z = theta(&ModuleVector::zero(d, n), &y).unwrap();
            prop_assert!(z.max_abs() == 0.0);
        }

        #[test]
        fn expansion_is_exact(seed in any::<u64>(), d in 1usize..4, n in 1usize..4) {
            let mut s = Sampler::new(seed);
            let m = s.operator(d, n);
            prop_assert!(sum_thetas(&finite_rank_expand(&m)).unwrap().distance(&m) < 1e-14);
        }
    }
}
