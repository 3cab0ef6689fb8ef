use serde::Serialize;

use crate::algebra::Tolerance;
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, rank_one_factor, singular_values, CMatrix};
use crate::module::{ModuleVector, OperatorMatrix};
use crate::preserver::structured::{BlackBoxPreserver, PreserverKind, StructuredPreserver};
use crate::sample::Sampler;

/// Whether the images of each `L_x` land in some `L_y` (row type) or in
/// some `R_f` (column type).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PreserverType {
    RowType,
    ColumnType,
}

const RANDOM_PROBES: usize = 3;
const PROBE_SEED: u64 = 0x5eed;

/// Basis vectors followed by a few fixed pseudo-random coordinate-invertible vectors.
fn probe_vectors(d: usize, n: usize, label: &str) -> Vec<ModuleVector> {
    let mut s = Sampler::stream(PROBE_SEED, label, ((d as u64) << 32) | n as u64);
    (0..d)
        .map(|i| ModuleVector::basis(i, d, n))
        .chain((0..RANDOM_PROBES).map(|_| s.full_ci_vector(d, n)))
        .collect()
}

pub fn detect_type(phi: &BlackBoxPreserver, tol: Tolerance) -> Result<PreserverType> {
    let (d, n) = (phi.dim(), phi.spectrum_size());
    let xs = probe_vectors(d, n, "detect_type/x");
    let fs = probe_vectors(d, n, "detect_type/f");
    let mut all_row = true;
    let mut all_column = true;
    for x in &xs {
        let images = fs.iter().map(|f| phi.apply_theta(x, f)).collect::<Result<Vec<_>>>()?;
        for img in &images {
            if let Some((point, &rank)) = img.pointwise_rank(tol).iter().enumerate().find(|(_, &r)| r > 1) {
                return Err(Error::NotRankDecreasing { point, rank });
            }
        }
        for t in 0..n {
            let pts: Vec<&CMatrix> = images.iter().map(|m| m.point(t)).collect();
            // rank of [M_1 M_2 ...] <= 1 iff the column spaces agree; stacked vertically for rows
            let side = CMatrix::from_fn(d, d * pts.len(), |r, c| pts[c / d][(r, c % d)]);
            let stacked = CMatrix::from_fn(d * pts.len(), d, |r, c| pts[r / d][(r % d, c)]);
            all_row &= numerical_rank(&side, tol) <= 1;
            all_column &= numerical_rank(&stacked, tol) <= 1;
        }
    }
    match (all_row, all_column) {
        (true, _) => Ok(PreserverType::RowType),
        (false, true) => Ok(PreserverType::ColumnType),
        (false, false) => Err(Error::Inconsistent),
    }
}

/// Every `Phi(theta(x, f))` with `x` a probe and `f` coordinate invertible
/// must have pointwise rank exactly one.
fn check_rank_one_preserving(phi: &BlackBoxPreserver, tol: Tolerance) -> Result<()> {
    let (d, n) = (phi.dim(), phi.spectrum_size());
    let xs = probe_vectors(d, n, "classify/x");
    let fs = probe_vectors(d, n, "classify/f");
    for (xi, x) in xs.iter().enumerate() {
        for (fi, f) in fs.iter().enumerate() {
            let img = phi.apply_theta(x, f)?;
            if let Some((point, &rank)) = img.pointwise_rank(tol).iter().enumerate().find(|(_, &r)| r != 1) {
                return Err(Error::NotRankOnePreserving {
                    reason: format!("image of probe ({xi}, {fi}) has rank {rank} at spectrum point {point}"),
                });
            }
        }
    }
    Ok(())
}

/// Picks the gauge: the first entry of largest modulus of the left factor becomes 1.
fn gauge_pivot(u: &nalgebra::DVector<num_complex::Complex64>) -> usize {
    let top = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    u.iter().position(|z| z.norm() >= top * (1.0 - 1e-9)).unwrap_or(0)
}

/// Recovers a canonical form `(kind, left, right)` reproducing every
/// generator image of `phi`.
pub fn classify(phi: &BlackBoxPreserver, tol: Tolerance) -> Result<StructuredPreserver> {
    check_rank_one_preserving(phi, tol)?;
    let kind = match detect_type(phi, tol) {
        Ok(PreserverType::RowType) => PreserverKind::Linear,
        Ok(PreserverType::ColumnType) => PreserverKind::Transpose,
        Err(Error::NotRankDecreasing { point, rank }) => {
            return Err(Error::NotRankOnePreserving {
                reason: format!("image has rank {rank} at spectrum point {point}"),
            })
        }
        Err(e) => return Err(e),
    };
    let (d, n) = (phi.dim(), phi.spectrum_size());
    // table[i][j] = a_i c_j^H for the linear form; the transpose form swaps i and j
    let table = |i: usize, j: usize| match kind {
        PreserverKind::Linear => phi.image(i, j),
        PreserverKind::Transpose => phi.image(j, i),
    };

    let mut left_points = Vec::with_capacity(n);
    let mut right_points = Vec::with_capacity(n);
    for t in 0..n {
        // block (i, j) of the d^2 x d^2 matrix is table[i][j](t); it is rank one
        // exactly when table[i][j] = a_i c_j^H for fixed vectors a_i, c_j
        let blocks = CMatrix::from_fn(d * d, d * d, |r, c| table(r / d, c / d).point(t)[(r % d, c % d)]);
        let rank = numerical_rank(&blocks, tol);
        if rank != 1 {
            let sv = singular_values(&blocks);
            return Err(Error::GaugeFailure { residual: sv.get(1).copied().unwrap_or(0.0) });
        }
        let (mut u, mut v) = rank_one_factor(&blocks);
        let pivot = u[gauge_pivot(&u)];
        u /= pivot;
        v *= pivot.conj();
        let a = CMatrix::from_fn(d, d, |r, i| u[i * d + r]);
        let c = CMatrix::from_fn(d, d, |r, j| v[j * d + r]);
        left_points.push(a);
        right_points.push(c.adjoint());
    }
    let preserver = StructuredPreserver::new(
        kind,
        OperatorMatrix::from_points(left_points),
        OperatorMatrix::from_points(right_points),
    )?;
    let residual = reconstruction_residual(&preserver, phi)?;
    let scale = phi.images().iter().flatten().map(OperatorMatrix::max_abs).fold(0.0, f64::max);
    if residual > tol.threshold(scale) {
        return Err(Error::GaugeFailure { residual });
    }
    // a singular factor sends some theta(x, f) to a rank-zero image at that point
    for (side, m) in [("left", &preserver.left), ("right", &preserver.right)] {
        if let Err(Error::NotInvertible { point }) = m.inverse(tol) {
            return Err(Error::NotRankOnePreserving {
                reason: format!("{side} factor is singular at spectrum point {point}"),
            });
        }
    }
    Ok(preserver)
}

/// Largest entrywise deviation between `p` and `phi` over all generator images.
pub fn reconstruction_residual(p: &StructuredPreserver, phi: &BlackBoxPreserver) -> Result<f64> {
    p.left.check_shape(phi.image(0, 0))?;
    let rebuilt = p.to_black_box();
    Ok(rebuilt
        .images()
        .iter()
        .flatten()
        .zip(phi.images().iter().flatten())
        .map(|(a, b)| a.distance(b))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::theta;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn random_preserver(s: &mut Sampler, kind: PreserverKind, d: usize, n: usize) -> StructuredPreserver {
        StructuredPreserver::new(kind, s.invertible_operator(d, n), s.invertible_operator(d, n)).unwrap()
    }

    #[test]
    fn detect_linear_and_transpose() {
        let mut s = Sampler::new(31);
        for (d, n) in [(2, 1), (2, 3), (3, 2)] {
            let lin = random_preserver(&mut s, PreserverKind::Linear, d, n).to_black_box();
            assert_eq!(detect_type(&lin, tol()).unwrap(), PreserverType::RowType);
            let tr = random_preserver(&mut s, PreserverKind::Transpose, d, n).to_black_box();
            assert_eq!(detect_type(&tr, tol()).unwrap(), PreserverType::ColumnType);
        }
        let id = StructuredPreserver::identity(3, 2).to_black_box();
        assert_eq!(detect_type(&id, tol()).unwrap(), PreserverType::RowType);
    }

    #[test]
    fn detect_rejects_rank_two_images() {
        // Phi(T) = T + T^t sends theta(e1, e2) to a rank-two operator
        let d = 2;
        let images = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let u = theta(&ModuleVector::basis(i, d, 1), &ModuleVector::basis(j, d, 1)).unwrap();
                        &u + &u.transpose()
                    })
                    .collect()
            })
            .collect();
        let phi = BlackBoxPreserver::new(images).unwrap();
        assert!(matches!(detect_type(&phi, tol()), Err(Error::NotRankDecreasing { rank: 2, .. })));
        assert!(matches!(classify(&phi, tol()), Err(Error::NotRankOnePreserving { .. })));
    }

    #[test]
    fn classify_roundtrip_both_kinds() {
        let mut s = Sampler::new(77);
        for kind in [PreserverKind::Linear, PreserverKind::Transpose] {
            let p = random_preserver(&mut s, kind, 3, 2);
            let phi = p.to_black_box();
            let got = classify(&phi, tol()).unwrap();
            assert_eq!(got.kind, kind);
            assert!(reconstruction_residual(&got, &phi).unwrap() < 1e-9);
        }
    }

    #[test]
    fn classify_identity() {
        let phi = StructuredPreserver::identity(3, 2).to_black_box();
        let got = classify(&phi, tol()).unwrap();
        assert_eq!(got.kind, PreserverKind::Linear);
        let product = &got.left * &got.right;
        // left * right = identity up to the scalar gauge, which is 1 here since left = I
        assert!(product.distance(&OperatorMatrix::identity(3, 2)) < 1e-12);
        assert!(reconstruction_residual(&got, &phi).unwrap() < 1e-12);
    }

    #[test]
    fn gauge_covariance() {
        let mut s = Sampler::new(5);
        let p = random_preserver(&mut s, PreserverKind::Linear, 3, 3);
        let alpha = s.invertible_element(3);
        let rescaled = StructuredPreserver::new(
            PreserverKind::Linear,
            p.left.scale(&alpha),
            p.right.scale(&alpha.inverse(tol()).unwrap()),
        )
        .unwrap();
        let (a, b) = (p.to_black_box(), rescaled.to_black_box());
        for (x, y) in a.images().iter().flatten().zip(b.images().iter().flatten()) {
            assert!(x.distance(y) < 1e-12);
        }
        let (ca, cb) = (classify(&a, tol()).unwrap(), classify(&b, tol()).unwrap());
        assert!(ca.left.distance(&cb.left) < 1e-9);
        assert!(ca.right.distance(&cb.right) < 1e-9);
    }

    #[test]
    fn zero_image_is_not_rank_one_preserving() {
        let mut s = Sampler::new(9);
        let p = StructuredPreserver::new(PreserverKind::Linear, s.singular_operator(2, 2), s.invertible_operator(2, 2)).unwrap();
        assert!(matches!(classify(&p.to_black_box(), tol()), Err(Error::NotRankOnePreserving { .. })));
    }

    #[test]
    fn forward_direction_of_characterization() {
        // structured preservers with invertible factors send theta(x, f), f in CI, to rank one
        let mut s = Sampler::new(13);
        for kind in [PreserverKind::Linear, PreserverKind::Transpose] {
            let p = random_preserver(&mut s, kind, 3, 2);
            for _ in 0..10 {
                let (x, f) = (s.full_ci_vector(3, 2), s.ci_vector(3, 2));
                let img = p.apply(&theta(&x, &f).unwrap()).unwrap();
                assert_eq!(img.pointwise_rank(tol()), vec![1, 1]);
            }
        }
    }
}
