use serde::{Deserialize, Deserializer, Serialize};

use crate::algebra::Tolerance;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, CMatrix};
use crate::module::{theta, ModuleVector, OperatorMatrix};

/// Which canonical form a preserver takes.
///
/// `Transpose` is `T -> L T^t R` with the plain (unstarred) transpose. The
/// conjugate-linear form `T -> A T^* B` with conjugate-linear `A`, `B` is
/// this with `L = A o star` and `R = star o B`, since the entrywise star of
/// `T^*` is `T^t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PreserverKind {
    Linear,
    Transpose,
}

/// A preserver in canonical form: `T -> left * T * right` or
/// `T -> left * T^t * right`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuredPreserver {
    pub kind: PreserverKind,
    pub left: OperatorMatrix,
    pub right: OperatorMatrix,
}

impl StructuredPreserver {
    pub fn new(kind: PreserverKind, left: OperatorMatrix, right: OperatorMatrix) -> Result<Self> {
        left.check_shape(&right)?;
        Ok(StructuredPreserver { kind, left, right })
    }

    pub fn identity(d: usize, n: usize) -> Self {
        StructuredPreserver {
            kind: PreserverKind::Linear,
            left: OperatorMatrix::identity(d, n),
            right: OperatorMatrix::identity(d, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.left.dim()
    }

    pub fn spectrum_size(&self) -> usize {
        self.left.spectrum_size()
    }

    pub fn apply(&self, t: &OperatorMatrix) -> Result<OperatorMatrix> {
        apply_structured(self, t)
    }

    /// The generator table `Phi(theta(e_i, e_j))`.
    pub fn to_black_box(&self) -> BlackBoxPreserver {
        let (d, n) = (self.dim(), self.spectrum_size());
        let images = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let unit = theta(&ModuleVector::basis(i, d, n), &ModuleVector::basis(j, d, n)).expect("same shape");
                        self.apply(&unit).expect("same shape")
                    })
                    .collect()
            })
            .collect();
        BlackBoxPreserver { images }
    }
}

impl<'de> Deserialize<'de> for StructuredPreserver {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            kind: PreserverKind,
            left: OperatorMatrix,
            right: OperatorMatrix,
        }
        let raw = Raw::deserialize(deserializer)?;
        StructuredPreserver::new(raw.kind, raw.left, raw.right).map_err(serde::de::Error::custom)
    }
}

pub fn apply_structured(p: &StructuredPreserver, t: &OperatorMatrix) -> Result<OperatorMatrix> {
    p.left.check_shape(t)?;
    let inner = match p.kind {
        PreserverKind::Linear => t.clone(),
        PreserverKind::Transpose => t.transpose(),
    };
    p.left.checked_mul(&inner)?.checked_mul(&p.right)
}

/// A module map on finite-rank operators, given by its values on the
/// matrix units: `images[i][j] = Phi(theta(e_i, e_j))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlackBoxPreserver {
    images: Vec<Vec<OperatorMatrix>>,
}

impl BlackBoxPreserver {
    pub fn new(images: Vec<Vec<OperatorMatrix>>) -> Result<Self> {
        let d = images.len();
        let first = images
            .first()
            .and_then(|row| row.first())
            .ok_or_else(|| Error::InvalidInput("empty image table".into()))?;
        check_dim(d, first.dim())?;
        for row in &images {
            check_dim(d, row.len())?;
            for m in row {
                first.check_shape(m)?;
            }
        }
        Ok(BlackBoxPreserver { images })
    }

    pub fn dim(&self) -> usize {
        self.images.len()
    }

    pub fn spectrum_size(&self) -> usize {
        self.images[0][0].spectrum_size()
    }

    pub fn images(&self) -> &[Vec<OperatorMatrix>] {
        &self.images
    }

    pub fn image(&self, i: usize, j: usize) -> &OperatorMatrix {
        &self.images[i][j]
    }

    /// `Phi(T) = sum_ij T_ij * images[i][j]`.
    pub fn apply(&self, t: &OperatorMatrix) -> Result<OperatorMatrix> {
        let (d, n) = (self.dim(), self.spectrum_size());
        check_dim(d, t.dim())?;
        check_dim(n, t.spectrum_size())?;
        let points = (0..n)
            .map(|s| {
                let mut acc = CMatrix::zeros(d, d);
                for i in 0..d {
                    for j in 0..d {
                        acc += self.images[i][j].point(s) * t.point(s)[(i, j)];
                    }
                }
                acc
            })
            .collect();
        Ok(OperatorMatrix::from_points(points))
    }

    /// `Phi(theta_{x,f})`.
    pub fn apply_theta(&self, x: &ModuleVector, f: &ModuleVector) -> Result<OperatorMatrix> {
        self.apply(&theta(x, f)?)
    }

    /// Pointwise `d^2 x d^2` matrix of `vec(T) -> vec(Phi(T))` (column-major vec).
    pub(crate) fn linear_map_at(&self, s: usize) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let img = self.images[i][j].point(s);
                let col = j * d + i;
                for c in 0..d {
                    for r in 0..d {
                        m[(c * d + r, col)] = img[(r, c)];
                    }
                }
            }
        }
        m
    }
}

impl<'de> Deserialize<'de> for BlackBoxPreserver {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            images: Vec<Vec<OperatorMatrix>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        BlackBoxPreserver::new(raw.images).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SurjectivityReport {
    pub surjective: bool,
    pub left_invertible: bool,
    pub right_invertible: bool,
}

/// Surjectivity is read off the rank of the induced map on `Mat_d` at each
/// spectrum point; factor invertibility is checked on the factors.
pub fn surjectivity_invertibility_check(p: &StructuredPreserver, tol: Tolerance) -> SurjectivityReport {
    let table = p.to_black_box();
    let d = p.dim();
    let surjective = (0..p.spectrum_size()).all(|s| linalg::numerical_rank(&table.linear_map_at(s), tol) == d * d);
    SurjectivityReport {
        surjective,
        left_invertible: p.left.is_invertible(tol),
        right_invertible: p.right.is_invertible(tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::{finite_rank_expand, sum_thetas};
    use crate::sample::Sampler;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn identity_preserver() {
        let mut s = Sampler::new(1);
        let t = s.operator(3, 2);
        assert_eq!(apply_structured(&StructuredPreserver::identity(3, 2), &t).unwrap(), t);
    }

    #[test]
    fn transpose_identity_preserver() {
        let mut s = Sampler::new(2);
        let t = s.operator(3, 2);
        let p = StructuredPreserver::new(PreserverKind::Transpose, OperatorMatrix::identity(3, 2), OperatorMatrix::identity(3, 2))
            .unwrap();
        assert_eq!(apply_structured(&p, &t).unwrap(), t.transpose());
    }

    #[test]
    fn theta_maps_to_theta_of_images() {
        let mut s = Sampler::new(3);
        let (a, b) = (s.invertible_operator(3, 2), s.invertible_operator(3, 2));
        let (x, f) = (s.vector(3, 2), s.vector(3, 2));
        let p = StructuredPreserver::new(PreserverKind::Linear, a.clone(), b.clone()).unwrap();
        let lhs = apply_structured(&p, &theta(&x, &f).unwrap()).unwrap();
        // A theta_{x,f} B = theta_{Ax, B^* f}
        let rhs = theta(&a.apply(&x).unwrap(), &b.adjoint().apply(&f).unwrap()).unwrap();
        assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn transpose_kind_is_conjugate_linear_form() {
        // L theta_{x,f}^t R = theta_{L conj(f), R^* conj(x)}
        let mut s = Sampler::new(4);
        let (l, r) = (s.invertible_operator(3, 2), s.invertible_operator(3, 2));
        let (x, f) = (s.vector(3, 2), s.vector(3, 2));
        let conj = |v: &ModuleVector| ModuleVector::new(v.coords().iter().map(|c| c.star()).collect()).unwrap();
        let p = StructuredPreserver::new(PreserverKind::Transpose, l.clone(), r.clone()).unwrap();
        let lhs = apply_structured(&p, &theta(&x, &f).unwrap()).unwrap();
        let rhs = theta(&l.apply(&conj(&f)).unwrap(), &r.adjoint().apply(&conj(&x)).unwrap()).unwrap();
        assert!(lhs.distance(&rhs) < 1e-12);
        // star(T^*) = T^t
        let t = s.operator(3, 2);
        assert_eq!(t.adjoint().conjugate(), t.transpose());
    }

    #[test]
    fn black_box_agrees_with_structured() {
        let mut s = Sampler::new(5);
        for kind in [PreserverKind::Linear, PreserverKind::Transpose] {
            let p = StructuredPreserver::new(kind, s.invertible_operator(2, 3), s.invertible_operator(2, 3)).unwrap();
            let table = p.to_black_box();
            let t = s.operator(2, 3);
            assert!(table.apply(&t).unwrap().distance(&p.apply(&t).unwrap()) < 1e-12);
            // generator-level route: sum of Phi(theta(T e_i, e_i))
            let via_expansion = finite_rank_expand(&t).iter().fold(OperatorMatrix::zeros(2, 3), |acc, (x, e)| {
                &acc + &p.apply(&theta(x, e).unwrap()).unwrap()
            });
            assert!(via_expansion.distance(&p.apply(&t).unwrap()) < 1e-12);
            assert!(sum_thetas(&finite_rank_expand(&t)).unwrap().distance(&t) < 1e-14);
        }
    }

    #[test]
    fn surjectivity_flags() {
        let mut s = Sampler::new(6);
        let p = StructuredPreserver::new(PreserverKind::Linear, s.invertible_operator(3, 2), s.invertible_operator(3, 2)).unwrap();
        let r = surjectivity_invertibility_check(&p, tol());
        assert!(r.surjective && r.left_invertible && r.right_invertible);
        let p = StructuredPreserver::new(PreserverKind::Transpose, s.singular_operator(3, 2), s.invertible_operator(3, 2)).unwrap();
        let r = surjectivity_invertibility_check(&p, tol());
        assert!(!r.surjective && !r.left_invertible && r.right_invertible);
        let r = surjectivity_invertibility_check(&StructuredPreserver::identity(2, 2), tol());
        assert!(r.surjective && r.left_invertible && r.right_invertible);
    }

    #[test]
    fn json_schema() {
        let p = StructuredPreserver::identity(1, 1);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"kind":"linear","left":[[[[1.0,0.0]]]],"right":[[[[1.0,0.0]]]]}"#);
        let back: StructuredPreserver = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let table = p.to_black_box();
        let s = serde_json::to_string(&table).unwrap();
        assert_eq!(s, r#"{"images":[[[[[[1.0,0.0]]]]]]}"#);
        assert_eq!(serde_json::from_str::<BlackBoxPreserver>(&s).unwrap(), table);
        let bad = r#"{"kind":"linear","left":[[[[1.0,0.0]]]],"right":[[[[1.0,0.0]],[[0.0,0.0]]],[[[0.0,0.0]],[[1.0,0.0]]]]}"#;
        assert!(serde_json::from_str::<StructuredPreserver>(bad).is_err());
    }
}
