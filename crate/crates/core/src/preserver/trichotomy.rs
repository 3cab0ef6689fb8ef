use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{Class, Element, Tolerance};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{numerical_rank, proportional_coefficient, CMatrix, CVector};
use crate::module::{theta, ModuleVector};
use crate::preserver::factor::proportionality_factor;

/// The data of an identity `theta(x1, g1) + theta(x2, g2) = theta(x3, g3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneSum {
    pub x1: ModuleVector,
    pub g1: ModuleVector,
    pub x2: ModuleVector,
    pub g2: ModuleVector,
    pub x3: ModuleVector,
    pub g3: ModuleVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrichotomyCase {
    /// `g1 = alpha1 * g2`
    G1MultipleOfG2,
    /// `g2 = alpha2 * g1`
    G2MultipleOfG1,
    /// `x1 = beta1 * x3` and `x2 = beta2 * x3`
    XFactors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Beta {
    #[serde(rename = "beta1")]
    First,
    #[serde(rename = "beta2")]
    Second,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrichotomyWitness {
    pub case: TrichotomyCase,
    pub coefficients: Vec<Element>,
    /// For [`TrichotomyCase::XFactors`], the first invertible coefficient.
    pub invertible_flag: Option<Beta>,
}

impl TrichotomyWitness {
    /// Deviation of the claimed case equation.
    pub fn residual(&self, sum: &RankOneSum) -> f64 {
        let c = &self.coefficients;
        match self.case {
            TrichotomyCase::G1MultipleOfG2 => sum.g1.distance(&sum.g2.scale(&c[0])),
            TrichotomyCase::G2MultipleOfG1 => sum.g2.distance(&sum.g1.scale(&c[0])),
            TrichotomyCase::XFactors => {
                sum.x1.distance(&sum.x3.scale(&c[0])).max(sum.x2.distance(&sum.x3.scale(&c[1])))
            }
        }
    }
}

impl RankOneSum {
    pub fn new(
        x1: ModuleVector,
        g1: ModuleVector,
        x2: ModuleVector,
        g2: ModuleVector,
        x3: ModuleVector,
        g3: ModuleVector,
    ) -> Self {
        RankOneSum { x1, g1, x2, g2, x3, g3 }
    }

    /// `|theta(x1,g1) + theta(x2,g2) - theta(x3,g3)|` and the scale it is measured against.
    pub fn identity_residual(&self) -> Result<(f64, f64)> {
        let lhs = &theta(&self.x1, &self.g1)? + &theta(&self.x2, &self.g2)?;
        let rhs = theta(&self.x3, &self.g3)?;
        Ok((lhs.distance(&rhs), lhs.max_abs().max(rhs.max_abs())))
    }

    fn vectors(&self) -> [&ModuleVector; 6] {
        [&self.x1, &self.g1, &self.x2, &self.g2, &self.x3, &self.g3]
    }
}

/// Returns a witness for one of the three cases, tried in the order
/// `g1 = a g2`, `g2 = a g1`, then the factorization of `x1`, `x2` through `x3`.
pub fn rank_one_sum_trichotomy(sum: &RankOneSum, tol: Tolerance) -> Result<TrichotomyWitness> {
    let vs = sum.vectors();
    for v in &vs[1..] {
        check_dim(sum.x1.dim(), v.dim())?;
        check_dim(sum.x1.spectrum_size(), v.spectrum_size())?;
    }
    if !sum.g1.is_coordinate_invertible(tol) || !sum.g2.is_coordinate_invertible(tol) {
        return Err(Error::InvalidInput("g1 and g2 must be coordinate invertible".into()));
    }
    let (residual, scale) = sum.identity_residual()?;
    if residual > tol.threshold(scale) {
        return Err(Error::EquationViolated { residual });
    }

    if let Ok(alpha) = proportionality_factor(&sum.g2, &sum.g1, tol) {
        return Ok(TrichotomyWitness {
            case: TrichotomyCase::G1MultipleOfG2,
            coefficients: vec![alpha],
            invertible_flag: None,
        });
    }
    if let Ok(alpha) = proportionality_factor(&sum.g1, &sum.g2, tol) {
        return Ok(TrichotomyWitness {
            case: TrichotomyCase::G2MultipleOfG1,
            coefficients: vec![alpha],
            invertible_flag: None,
        });
    }

    let scale = vs.iter().map(|v| v.max_abs()).fold(0.0, f64::max);
    let accept = |betas: &(Element, Element)| {
        let w = x_factor_witness(betas.0.clone(), betas.1.clone(), tol);
        (w.residual(sum) <= tol.threshold(scale)).then_some(w)
    };
    if let Some(betas) = basis_recipe(sum, tol) {
        if let Some(w) = accept(&betas) {
            return Ok(w);
        }
    }
    let betas = pointwise_recipe(sum, tol)?;
    accept(&betas).ok_or(Error::NoWitness { point: 0 })
}

fn x_factor_witness(beta1: Element, beta2: Element, tol: Tolerance) -> TrichotomyWitness {
    let invertible_flag = if beta1.is_invertible(tol) {
        Some(Beta::First)
    } else if beta2.is_invertible(tol) {
        Some(Beta::Second)
    } else {
        None
    };
    TrichotomyWitness { case: TrichotomyCase::XFactors, coefficients: vec![beta1, beta2], invertible_flag }
}

/// Basis-coordinate recipe: pick `e_k` with `<e_k, g2> = 0` and `<e_k, g1>`
/// invertible (or the mirror image), solve for one beta, subtract, solve
/// for the other.
fn basis_recipe(sum: &RankOneSum, tol: Tolerance) -> Option<(Element, Element)> {
    let d = sum.g1.dim();
    let class = |v: &ModuleVector, k: usize| v.coord(k).classify(tol);
    let separating = |a: &ModuleVector, b: &ModuleVector| {
        (0..d).find(|&k| class(b, k) == Class::Zero && class(a, k) == Class::Invertible)
    };
    // <e_k, g> = star(g_k)
    let solve = |g: &ModuleVector, target: &ModuleVector, k: usize| -> Option<Element> {
        let pivot = g.coord(k).star().inverse(tol).ok()?;
        Some(&pivot * &target.coord(k).star())
    };
    let second_stage = |g_first: &ModuleVector, beta_first: &Element, g_other: &ModuleVector| -> Option<Element> {
        let rest = sum.g3.checked_sub(&g_first.scale(&beta_first.star())).ok()?;
        let k = (0..d).find(|&k| class(g_other, k) == Class::Invertible)?;
        solve(g_other, &rest, k)
    };
    if let Some(k) = separating(&sum.g1, &sum.g2) {
        let beta1 = solve(&sum.g1, &sum.g3, k)?;
        let beta2 = second_stage(&sum.g1, &beta1, &sum.g2)?;
        return Some((beta1, beta2));
    }
    if let Some(k) = separating(&sum.g2, &sum.g1) {
        let beta2 = solve(&sum.g2, &sum.g3, k)?;
        let beta1 = second_stage(&sum.g2, &beta2, &sum.g1)?;
        return Some((beta1, beta2));
    }
    None
}

/// Pointwise recipe for when no basis vector separates `g1` from `g2`:
/// at each spectrum point, test the identity against the dual vectors
/// `xi` with `<xi, g1> = 1, <xi, g2> = 0` (and vice versa).
fn pointwise_recipe(sum: &RankOneSum, tol: Tolerance) -> Result<(Element, Element)> {
    let (d, n) = (sum.g1.dim(), sum.g1.spectrum_size());
    let zero = Complex64::new(0.0, 0.0);
    let mut beta1 = Vec::with_capacity(n);
    let mut beta2 = Vec::with_capacity(n);
    for t in 0..n {
        let (g1, g2, g3) = (sum.g1.at(t), sum.g2.at(t), sum.g3.at(t));
        let g = CMatrix::from_columns(&[g1, g2]);
        if d >= 2 && numerical_rank(&g, tol) == 2 {
            let gram_inv = (g.adjoint() * &g).try_inverse().ok_or(Error::NoWitness { point: t })?;
            let dual = &g * gram_inv;
            let xi1: CVector = dual.column(0).into();
            let xi2: CVector = dual.column(1).into();
            beta1.push(g3.dotc(&xi1));
            beta2.push(g3.dotc(&xi2));
            continue;
        }
        // dependent at this point: (iii) can only hold if x1, x2 are multiples of x3 here
        let (x1, x2, x3) = (sum.x1.at(t), sum.x2.at(t), sum.x3.at(t));
        let scale = x1.norm().max(x2.norm()).max(x3.norm());
        if x3.norm() <= tol.threshold(scale) {
            if scale > tol.threshold(0.0) {
                return Err(Error::NoWitness { point: t });
            }
            beta1.push(zero);
            beta2.push(zero);
            continue;
        }
        let (b1, r1) = proportional_coefficient(&x3, &x1);
        let (b2, r2) = proportional_coefficient(&x3, &x2);
        if r1.max(r2) > tol.threshold(scale) {
            return Err(Error::NoWitness { point: t });
        }
        beta1.push(b1);
        beta2.push(b2);
    }
    Ok((Element::new(beta1), Element::new(beta2)))
}
