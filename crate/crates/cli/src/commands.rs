use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context};
use serde::Deserialize;
use serde_json::json;

use hilmod::free_prob::{
    fisher_information, moment_pairing_oracle, semicircular_moment, verify_conjugate_variable, ConjugateCheck,
    OperatorTrace, SandwichCovariance, MAX_MOMENT_ORDER,
};
use hilmod::preserver::{classify, reconstruction_residual, BlackBoxPreserver};
use hilmod::sample::Sampler;
use hilmod::{AlgebraState, Error, OperatorMatrix, Tolerance};

use crate::report::{Check, Report};
use crate::RunConfig;

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn require_input<'a>(path: Option<&'a Path>, command: &str) -> anyhow::Result<&'a Path> {
    path.with_context(|| format!("{command} needs --input PATH"))
}

pub fn classify_cmd(config: &RunConfig, input: Option<&Path>, report: &mut Report) -> anyhow::Result<()> {
    let phi: BlackBoxPreserver = read_json(require_input(input, "classify")?)?;
    let start = Instant::now();
    let tol = Tolerance(config.tol);
    match classify(&phi, tol) {
        Ok(p) => {
            let residual = reconstruction_residual(&p, &phi)?;
            report.push(Check::single("Prop 10/Thm 12", residual, tol.threshold(max_image(&phi)), start));
            report.result = Some(json!({
                "kind": p.kind,
                "left": p.left,
                "right": p.right,
                "residual": residual,
            }));
        }
        Err(e @ (Error::NotRankOnePreserving { .. } | Error::GaugeFailure { .. })) => {
            report.push(Check::single("Prop 10/Thm 12", f64::INFINITY, config.tol, start));
            report.result = Some(json!({ "error": error_tag(&e), "diagnostic": e.to_string() }));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn max_image(phi: &BlackBoxPreserver) -> f64 {
    phi.images().iter().flatten().map(OperatorMatrix::max_abs).fold(0.0, f64::max)
}

fn error_tag(e: &Error) -> &'static str {
    match e {
        Error::NotRankOnePreserving { .. } => "not_rank_one_preserving",
        Error::GaugeFailure { .. } => "gauge_failure",
        Error::NotInvertible { .. } => "not_invertible",
        _ => "error",
    }
}

#[derive(Deserialize)]
struct FisherInput {
    left: OperatorMatrix,
    right: OperatorMatrix,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

pub fn fisher_cmd(config: &RunConfig, input: Option<&Path>, report: &mut Report) -> anyhow::Result<()> {
    let raw: FisherInput = read_json(require_input(input, "fisher")?)?;
    let cov = SandwichCovariance::new(raw.left, raw.right)?;
    let n = cov.spectrum_size();
    let state = match raw.weights {
        Some(w) => AlgebraState::new(w)?,
        None => AlgebraState::uniform(n),
    };
    if state.spectrum_size() != n {
        bail!("state has {} weights but the covariance has {n} spectrum points", state.spectrum_size());
    }
    let tau = OperatorTrace::new(state);
    let tol = Tolerance(config.tol);

    let start = Instant::now();
    let fisher = match fisher_information(&cov, &tau, tol) {
        Ok(f) => f,
        Err(e @ Error::NotInvertible { .. }) => {
            report.push(Check::single("Thm 16", f64::INFINITY, config.tol, start));
            report.result = Some(json!({ "error": error_tag(&e), "diagnostic": e.to_string() }));
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    report.push(Check::single("Thm 16", fisher.deviation(), config.tol, start));

    let start = Instant::now();
    let check = ConjugateCheck { max_order: config.max_order, batch: config.trials, seed: config.seed, tol };
    let conj = verify_conjugate_variable(&cov, check)?;
    report.push(Check { trials: config.trials, ..Check::single("Def 15", conj.max_deviation(), config.tol, start) });

    report.result = Some(json!({
        "numeric": fisher.numeric,
        "closed_form": fisher.closed_form,
        "max_order_checked": conj.max_order_checked,
        "condition_deviations": conj.condition_deviations,
    }));
    Ok(())
}

#[derive(Deserialize)]
struct MomentsInput {
    covariance: SandwichCovariance,
    coefficients: Vec<OperatorMatrix>,
}

pub fn moments_cmd(config: &RunConfig, input: Option<&Path>, order: usize, report: &mut Report) -> anyhow::Result<()> {
    let (cov, coeffs) = match input {
        Some(path) => {
            let raw: MomentsInput = read_json(path)?;
            (raw.covariance, raw.coefficients)
        }
        None => {
            if order == 0 {
                bail!("--order must be at least 1");
            }
            let mut s = Sampler::stream(config.seed, "moments", 0);
            let (d, n) = (config.d, config.n);
            let cov = SandwichCovariance::new(s.operator(d, n), s.operator(d, n))?;
            (cov, (0..order - 1).map(|_| s.operator(d, n)).collect())
        }
    };
    let m = coeffs.len() + 1;
    if m > MAX_MOMENT_ORDER {
        bail!("moment order {m} exceeds the limit {MAX_MOMENT_ORDER}");
    }
    let start = Instant::now();
    let recursion = semicircular_moment(&cov, &coeffs)?;
    let oracle = moment_pairing_oracle(&cov, &coeffs)?;
    let deviation = recursion.distance(&oracle) / oracle.max_abs().max(1.0);
    report.push(Check::single("Def 14", deviation, config.tol, start));
    report.result = Some(json!({
        "order": m,
        "recursion": recursion,
        "oracle": oracle,
        "deviation": deviation,
    }));
    Ok(())
}
