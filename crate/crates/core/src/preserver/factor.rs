use num_complex::Complex64;

use crate::algebra::{Element, Tolerance};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{proportional_coefficient, CVector};
use crate::module::{ModuleVector, OperatorMatrix};

fn point_vector(coords: &[Element], t: usize) -> CVector {
    CVector::from_iterator(coords.len(), coords.iter().map(|c| c.at(t)))
}

fn covector_norm(coords: &[Element]) -> f64 {
    coords.iter().map(Element::norm).fold(0.0, f64::max)
}

/// Finds `b` with `sigma = phi * b`, where `phi` and `sigma` are the
/// coefficient covectors of two module-linear functionals
/// `x -> sum_i phi_i x_i`.
///
/// At spectrum points where `phi` vanishes, `b` is set to zero.
pub fn factor_functional(phi: &[Element], sigma: &[Element], tol: Tolerance) -> Result<Element> {
    check_dim(phi.len(), sigma.len())?;
    let first = phi.first().ok_or_else(|| Error::InvalidInput("empty covector".into()))?;
    let n = first.spectrum_size();
    for c in phi.iter().chain(sigma) {
        check_dim(n, c.spectrum_size())?;
    }
    let (phi_scale, sigma_scale) = (covector_norm(phi), covector_norm(sigma));
    let mut b = Vec::with_capacity(n);
    for t in 0..n {
        let (p, s) = (point_vector(phi, t), point_vector(sigma, t));
        if p.norm() <= tol.threshold(phi_scale) {
            if s.norm() > tol.threshold(sigma_scale) {
                return Err(Error::KernelViolation { point: t });
            }
            b.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let (coef, residual) = proportional_coefficient(&p, &s);
        if residual > tol.threshold(s.norm()) {
            return Err(Error::KernelViolation { point: t });
        }
        b.push(coef);
    }
    Ok(Element::new(b))
}

/// Finds `a` with `g2 = a * g1`, via the functionals `x -> <x, g_i>`.
pub fn proportionality_factor(g1: &ModuleVector, g2: &ModuleVector, tol: Tolerance) -> Result<Element> {
    check_dim(g1.dim(), g2.dim())?;
    let phi: Vec<Element> = g1.coords().iter().map(Element::star).collect();
    let sigma: Vec<Element> = g2.coords().iter().map(Element::star).collect();
    match factor_functional(&phi, &sigma, tol) {
        Ok(b) => Ok(b.star()),
        Err(Error::KernelViolation { point }) => Err(Error::NotProportional { point }),
        Err(e) => Err(e),
    }
}

/// Recovers the single scalar `lambda` with `map_b = lambda * map_a`, given
/// that `map_a` is injective and `map_b` is pointwise proportional to it.
pub fn extract_global_scalar(map_a: &OperatorMatrix, map_b: &OperatorMatrix, tol: Tolerance) -> Result<Element> {
    map_a.check_shape(map_b)?;
    let (d, n) = (map_a.dim(), map_a.spectrum_size());
    if let Some(point) = map_a.pointwise_rank(tol).iter().position(|&r| r < d) {
        return Err(Error::NotInjective { point });
    }
    let mut lambdas = Vec::with_capacity(d);
    for i in 0..d {
        let e = ModuleVector::basis(i, d, n);
        let (ax, bx) = (map_a.apply(&e)?, map_b.apply(&e)?);
        let lambda = proportionality_factor(&ax, &bx, tol).map_err(|_| Error::NotPointwiseProportional { index: i })?;
        lambdas.push(lambda);
    }
    let lambda = lambdas[0].clone();
    for other in &lambdas[1..] {
        for t in 0..n {
            let (a, b) = (lambda.at(t), other.at(t));
            if (a - b).norm() > tol.threshold(a.norm().max(b.norm())) {
                return Err(Error::NoGlobalScalar { point: t });
            }
        }
    }
    let residual = map_b.distance(&map_a.scale(&lambda));
    if residual > tol.threshold(map_b.max_abs()) {
        let point = (0..n)
            .find(|&t| (map_b.point(t) - map_a.point(t) * lambda.at(t)).camax() > tol.threshold(map_b.max_abs()))
            .unwrap_or(0);
        return Err(Error::NoGlobalScalar { point });
    }
    Ok(lambda)
}
