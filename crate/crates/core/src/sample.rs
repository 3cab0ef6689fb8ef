//! Deterministic random instances for property tests and verification runs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::algebra::{Element, Tolerance};
use crate::module::{ModuleVector, OperatorMatrix};

/// Upper bound on the pointwise condition number of sampled invertible operators.
pub const MAX_CONDITION: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Vector,
    CiVector,
    InvertibleOperator,
    Operator,
}

impl SampleKind {
    fn label(self) -> &'static str {
        match self {
            SampleKind::Vector => "vector",
            SampleKind::CiVector => "ci_vector",
            SampleKind::InvertibleOperator => "invertible_operator",
            SampleKind::Operator => "operator",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Vector(ModuleVector),
    Operator(OperatorMatrix),
}

/// One sample of the given kind, a pure function of `(kind, seed, d, n)`.
pub fn random_sampler(kind: SampleKind, seed: u64, d: usize, n: usize) -> Sample {
    assert!(d >= 1 && n >= 1, "d and n must be positive");
    let mut s = Sampler::stream(seed, kind.label(), ((d as u64) << 32) | n as u64);
    match kind {
        SampleKind::Vector => Sample::Vector(s.vector(d, n)),
        SampleKind::CiVector => Sample::Vector(s.ci_vector(d, n)),
        SampleKind::InvertibleOperator => Sample::Operator(s.invertible_operator(d, n)),
        SampleKind::Operator => Sample::Operator(s.operator(d, n)),
    }
}

/// Seeded generator of algebra elements, vectors and operators.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream for `(seed, label, index)`; parallel consumers
    /// deriving their own streams see the same values in any order.
    pub fn stream(seed: u64, label: &str, index: u64) -> Self {
        let mut h = Sha256::new();
        h.update(seed.to_le_bytes());
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
        h.update(index.to_le_bytes());
        let digest = h.finalize();
        let mut key = [0u8; 32];
        key.copy_from_slice(&digest);
        Sampler { rng: ChaCha8Rng::from_seed(key) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.random_range(0..upper)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random_bool(0.5)
    }

    /// Uniform on the square `[-1, 1]^2`.
    pub fn complex(&mut self) -> Complex64 {
        Complex64::new(self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0))
    }

    /// Modulus in `[0.5, 1.5]`, uniform phase.
    pub fn unit_scale_complex(&mut self) -> Complex64 {
        let r = self.uniform(0.5, 1.5);
        let phase = self.uniform(0.0, std::f64::consts::TAU);
        Complex64::from_polar(r, phase)
    }

    pub fn element(&mut self, n: usize) -> Element {
        Element::new((0..n).map(|_| self.complex()).collect())
    }

    pub fn invertible_element(&mut self, n: usize) -> Element {
        Element::new((0..n).map(|_| self.unit_scale_complex()).collect())
    }

    pub fn vector(&mut self, d: usize, n: usize) -> ModuleVector {
        ModuleVector::new((0..d).map(|_| self.element(n)).collect()).expect("consistent shape")
    }

    /// Coordinate-invertible vector: random zero pattern with at least one
    /// invertible coordinate.
    pub fn ci_vector(&mut self, d: usize, n: usize) -> ModuleVector {
        let keep = self.index(d);
        let coords = (0..d)
            .map(|i| {
                if i == keep || self.coin() {
                    self.invertible_element(n)
                } else {
                    Element::zero(n)
                }
            })
            .collect();
        let v = ModuleVector::new(coords).expect("consistent shape");
        debug_assert!(v.is_coordinate_invertible(Tolerance::default()));
        v
    }

    /// Coordinate-invertible vector with every coordinate invertible.
    pub fn full_ci_vector(&mut self, d: usize, n: usize) -> ModuleVector {
        ModuleVector::new((0..d).map(|_| self.invertible_element(n)).collect()).expect("consistent shape")
    }

    pub fn operator(&mut self, d: usize, n: usize) -> OperatorMatrix {
        let rows = (0..d).map(|_| (0..d).map(|_| self.element(n)).collect()).collect();
        OperatorMatrix::from_entries(rows).expect("consistent shape")
    }

    /// Operator whose pointwise condition number is at most [`MAX_CONDITION`].
    pub fn invertible_operator(&mut self, d: usize, n: usize) -> OperatorMatrix {
        loop {
            let m = self.operator(d, n);
            if m.condition_number() <= MAX_CONDITION {
                return m;
            }
        }
    }

    /// Operator made singular at one random spectrum point.
    pub fn singular_operator(&mut self, d: usize, n: usize) -> OperatorMatrix {
        let m = self.invertible_operator(d, n);
        let t = self.index(n);
        let weights: Vec<Complex64> = (0..d).map(|_| self.complex()).collect();
        let mut points = m.points().to_vec();
        let p = &mut points[t];
        // last row becomes a combination of the others (the zero row when d = 1)
        let combo = (0..d - 1).fold(p.row(0) * Complex64::new(0.0, 0.0), |acc, i| acc + p.row(i) * weights[i]);
        p.set_row(d - 1, &combo);
        OperatorMatrix::from_points(points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ci_vector_is_ci() {
        for seed in 0..50 {
            match random_sampler(SampleKind::CiVector, seed, 3, 2) {
                Sample::Vector(v) => assert!(v.is_coordinate_invertible(Tolerance::default())),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn invertible_operator_has_nonzero_determinant() {
        match random_sampler(SampleKind::InvertibleOperator, 7, 3, 3) {
            Sample::Operator(m) => {
                let det = m.determinant();
                assert!(det.values().iter().all(|z| z.norm() > 1e-12));
                assert!(m.condition_number() <= MAX_CONDITION);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn deterministic() {
        for kind in [SampleKind::Vector, SampleKind::CiVector, SampleKind::InvertibleOperator, SampleKind::Operator] {
            assert_eq!(random_sampler(kind, 99, 2, 3), random_sampler(kind, 99, 2, 3));
        }
        assert_ne!(
            random_sampler(SampleKind::Vector, 1, 2, 2),
            random_sampler(SampleKind::Vector, 2, 2, 2)
        );
        let mut a = Sampler::stream(5, "x", 3);
        let mut b = Sampler::stream(5, "x", 3);
        assert_eq!(a.operator(2, 2), b.operator(2, 2));
    }

    #[test]
    fn singular_operator_drops_rank_at_one_point() {
        let mut s = Sampler::new(4);
        for d in 1..4 {
            let m = s.singular_operator(d, 3);
            let ranks = m.pointwise_rank(Tolerance::default());
            assert_eq!(ranks.iter().filter(|&&r| r < d).count(), 1, "{ranks:?}");
        }
    }
}
