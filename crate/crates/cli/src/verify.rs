//! Seeded randomized batteries, one per labelled statement.

use hilmod::free_prob::{
    cumulant, fisher_information, verify_conjugate_variable, ConjugateCheck, MomentWord, OperatorTrace,
    SandwichCovariance,
};
use hilmod::preserver::{
    classify, detect_type, extract_global_scalar, factor_functional, proportionality_factor, rank_one_sum_trichotomy,
    reconstruction_residual, surjectivity_invertibility_check, Beta, PreserverKind, PreserverType, RankOneSum,
    StructuredPreserver,
};
use hilmod::sample::Sampler;
use hilmod::{theta, Class, Complex64, Element, Error, ModuleVector, OperatorMatrix, Tolerance};

use crate::report::{Check, Report};
use crate::RunConfig;

/// Deviation recorded for a failed boolean property or an unexpected error.
const FAILED: f64 = f64::INFINITY;

fn flag(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        FAILED
    }
}

fn relative(dev: f64, scale: f64) -> f64 {
    dev / scale.max(1.0)
}

/// Adds to `target` at point `t` a vector that is not a multiple of `base(t)`.
/// Needs `d >= 2` when `base(t) != 0`.
fn corrupt_at(s: &mut Sampler, target: &ModuleVector, base: &ModuleVector, t: usize) -> ModuleVector {
    let at: Vec<Complex64> = base.coords().iter().map(|c| c.at(t)).collect();
    let norm2: f64 = at.iter().map(|z| z.norm_sqr()).sum();
    let mut w: Vec<Complex64> = (0..base.dim()).map(|_| s.unit_scale_complex()).collect();
    if norm2 > 0.0 {
        let proj = at.iter().zip(&w).map(|(a, x)| a.conj() * x).sum::<Complex64>() / norm2;
        for (x, a) in w.iter_mut().zip(&at) {
            *x -= proj * a;
        }
    }
    let coords = target
        .coords()
        .iter()
        .zip(&w)
        .map(|(c, dw)| {
            let mut vals = c.values().to_vec();
            vals[t] += dw;
            Element::new(vals)
        })
        .collect();
    ModuleVector::new(coords).expect("same shape")
}

fn kinds(s: &mut Sampler) -> PreserverKind {
    if s.coin() {
        PreserverKind::Linear
    } else {
        PreserverKind::Transpose
    }
}

fn random_preserver(s: &mut Sampler, d: usize, n: usize) -> StructuredPreserver {
    let kind = kinds(s);
    StructuredPreserver::new(kind, s.invertible_operator(d, n), s.invertible_operator(d, n)).expect("same shape")
}

pub fn run(config: &RunConfig, report: &mut Report) {
    let (d, n, tol) = (config.d, config.n, config.tol);
    let t = Tolerance(tol);
    let stream = |label: &str, i: usize| Sampler::stream(config.seed, label, i as u64);
    let check = |name: &'static str, trial: &mut dyn FnMut(&mut Sampler, usize) -> Option<f64>| {
        Check::run(name, config.trials, tol, |i| trial(&mut stream(name, i), i))
    };

    report.push(check("Lemma 2", &mut |s, _| {
        // theta(x, y) = 0 with y CI forces x = 0: recover x from theta(x, y) e_k
        let (x, y) = (s.vector(d, n), s.ci_vector(d, n));
        let m = theta(&x, &y).ok()?;
        let k = (0..d).find(|&k| y.coord(k).classify(t) == Class::Invertible)?;
        let col = m.apply(&ModuleVector::basis(k, d, n)).ok()?;
        let inv = y.coord(k).star().inverse(t).ok()?;
        Some(col.scale(&inv).distance(&x))
    }));

    report.push(check("Lemma 3", &mut |s, _| {
        let (phi, b) = (s.vector(d, n), s.element(n));
        let sigma = phi.scale(&b);
        let dev = match factor_functional(phi.coords(), sigma.coords(), t) {
            Ok(got) => got.distance(&b),
            Err(_) => FAILED,
        };
        if d < 2 {
            return Some(dev);
        }
        let p = s.index(n);
        let bad = corrupt_at(s, &sigma, &phi, p);
        let rejected = matches!(factor_functional(phi.coords(), bad.coords(), t), Err(Error::KernelViolation { .. }));
        Some(dev.max(flag(rejected)))
    }));

    report.push(check("Corollary 4", &mut |s, _| {
        let (g1, a) = (s.vector(d, n), s.element(n));
        let g2 = g1.scale(&a);
        let dev = match proportionality_factor(&g1, &g2, t) {
            Ok(got) => got.distance(&a),
            Err(_) => FAILED,
        };
        if d < 2 {
            return Some(dev);
        }
        let p = s.index(n);
        let bad = corrupt_at(s, &g2, &g1, p);
        let rejected = matches!(proportionality_factor(&g1, &bad, t), Err(Error::NotProportional { .. }));
        Some(dev.max(flag(rejected)))
    }));

    let x_factor_sum = |s: &mut Sampler| {
        let (g1, g2) = (s.full_ci_vector(d, n), s.full_ci_vector(d, n));
        let (b1, b2) = (s.invertible_element(n), s.invertible_element(n));
        let x3 = s.vector(d, n);
        let g3 = g1.scale(&b1.star()).checked_add(&g2.scale(&b2.star())).expect("same shape");
        RankOneSum::new(x3.scale(&b1), g1, x3.scale(&b2), g2, x3, g3)
    };

    report.push(check("Lemma 5", &mut |s, i| {
        let sum = match i % 3 {
            0 => {
                let (g2, alpha) = (s.ci_vector(d, n), s.invertible_element(n));
                let (x1, x2) = (s.vector(d, n), s.vector(d, n));
                let x3 = x1.scale(&alpha.star()).checked_add(&x2).expect("same shape");
                RankOneSum::new(x1, g2.scale(&alpha), x2, g2.clone(), x3, g2)
            }
            1 => {
                let (g1, alpha) = (s.ci_vector(d, n), s.invertible_element(n));
                let (x1, x2) = (s.vector(d, n), s.vector(d, n));
                let x3 = x2.scale(&alpha.star()).checked_add(&x1).expect("same shape");
                RankOneSum::new(x1, g1.clone(), x2, g1.scale(&alpha), x3, g1)
            }
            _ => x_factor_sum(s),
        };
        Some(rank_one_sum_trichotomy(&sum, t).map_or(FAILED, |w| w.residual(&sum)))
    }));

    report.push(check("Corollary 6", &mut |s, _| {
        let sum = x_factor_sum(s);
        let independent =
            proportionality_factor(&sum.g2, &sum.g1, t).is_err() && proportionality_factor(&sum.g1, &sum.g2, t).is_err();
        if !independent || !sum.g3.is_coordinate_invertible(t) {
            return None;
        }
        let Ok(w) = rank_one_sum_trichotomy(&sum, t) else {
            return Some(FAILED);
        };
        let beta = match w.invertible_flag {
            Some(Beta::First) => &w.coefficients[0],
            Some(Beta::Second) => &w.coefficients[1],
            None => return Some(FAILED),
        };
        Some(flag(beta.is_invertible(t)).max(w.residual(&sum)))
    }));

    report.push(check("Lemma 7/Prop 8", &mut |s, _| {
        let p = random_preserver(s, d, n);
        let expected = match p.kind {
            PreserverKind::Linear => PreserverType::RowType,
            PreserverKind::Transpose => PreserverType::ColumnType,
        };
        Some(match detect_type(&p.to_black_box(), t) {
            // one-dimensional modules cannot tell the two kinds apart
            Ok(found) => flag(found == expected || d == 1),
            Err(_) => FAILED,
        })
    }));

    report.push(check("Lemma 9", &mut |s, _| {
        let (map_a, lambda) = (s.invertible_operator(d, n), s.invertible_element(n));
        let map_b = map_a.scale(&lambda);
        Some(extract_global_scalar(&map_a, &map_b, t).map_or(FAILED, |got| got.distance(&lambda)))
    }));

    report.push(check("Prop 10/Thm 12", &mut |s, _| {
        let phi = random_preserver(s, d, n).to_black_box();
        let scale = phi.images().iter().flatten().map(OperatorMatrix::max_abs).fold(0.0, f64::max);
        Some(match classify(&phi, t).and_then(|q| reconstruction_residual(&q, &phi)) {
            Ok(r) => relative(r, scale),
            Err(_) => FAILED,
        })
    }));

    report.push(check("Thm 13", &mut |s, _| {
        let p = random_preserver(s, d, n);
        let m = s.operator(d, n);
        let direct = p.apply(&m).ok()?;
        let mut expanded = OperatorMatrix::zeros(d, n);
        for (fx, e) in hilmod::finite_rank_expand(&m) {
            expanded = &expanded + &p.apply(&theta(&fx, &e).ok()?).ok()?;
        }
        let bb = p.to_black_box().apply(&m).ok()?;
        Some(relative(direct.distance(&expanded).max(direct.distance(&bb)), direct.max_abs()))
    }));

    report.push(check("Cor 14", &mut |s, i| {
        let singular = i % 4 == 0;
        let (mut left, mut right) = (s.invertible_operator(d, n), s.invertible_operator(d, n));
        if singular {
            if s.coin() {
                left = s.singular_operator(d, n);
            } else {
                right = s.singular_operator(d, n);
            }
        }
        let kind = kinds(s);
        let r = surjectivity_invertibility_check(&StructuredPreserver::new(kind, left, right).ok()?, t);
        Some(flag(r.surjective == (r.left_invertible && r.right_invertible) && r.surjective != singular))
    }));

    report.push(check("Def 14", &mut |s, i| {
        let order = 1 + i % config.max_order.max(1);
        let cov = SandwichCovariance::new(s.operator(d, n), s.operator(d, n)).ok()?;
        let coeffs: Vec<_> = (0..order - 1).map(|_| s.operator(d, n)).collect();
        let expected = if order == 2 { cov.apply(&coeffs[0]).ok()? } else { OperatorMatrix::zeros(d, n) };
        let k = cumulant(&MomentWord::pure(coeffs), &cov, &OperatorMatrix::identity(d, n));
        Some(k.map_or(FAILED, |k| k.distance(&expected)))
    }));

    report.push(check("Def 15", &mut |s, i| {
        let cov = SandwichCovariance::new(s.invertible_operator(d, n), s.invertible_operator(d, n)).ok()?;
        let check = ConjugateCheck { max_order: config.max_order, batch: 4, seed: config.seed ^ i as u64, tol: t };
        Some(verify_conjugate_variable(&cov, check).map_or(FAILED, |r| r.max_deviation()))
    }));

    report.push(check("Thm 16", &mut |s, _| {
        let cov = SandwichCovariance::new(s.invertible_operator(d, n), s.invertible_operator(d, n)).ok()?;
        let r = fisher_information(&cov, &OperatorTrace::uniform(n), t);
        Some(r.map_or(FAILED, |r| relative(r.deviation(), r.closed_form.norm())))
    }));
}
